#pragma once

// Samplers for the four matrix families used in power studies.
//
//   wishart      density ∝ det(X)^(a-(d+1)/2) etr(-ΣX); a standard Wishart
//                with 2a degrees of freedom and scale (2Σ)^-1, so E[X] = aΣ^-1.
//                WishartParam::dof_scale instead reads (a, Σ) as a standard
//                Wishart with a degrees of freedom and scale Σ, E[X] = aΣ.
//   inv_wishart  X = W^-1 with W standard Wishart(a, Σ^-1); E[X] = Σ/(a-d-1)
//   cov_uniform  sample covariance of n_vec iid Uniform[0,1]^d vectors
//   cov_t        sample covariance of n_vec iid multivariate t_a(0, Σ) vectors

#include <Eigen/Dense>
#include <string>

#include "json.hpp"

#include "hankelcp/random.hpp"
#include "hankelcp/spd_matrix.hpp"

namespace hankelcp {

enum class Family { wishart, inv_wishart, cov_uniform, cov_t };

std::string to_string(Family family);
Family parse_family(const std::string& text);

enum class WishartParam { density, dof_scale };

std::string to_string(WishartParam param);
WishartParam parse_wishart_param(const std::string& text);

struct DistributionSpec {
  Family family = Family::wishart;
  int d = 2;
  double a = 2.5;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  int n_vec = 6;  // cov_* only
  WishartParam parametrization = WishartParam::density;  // wishart only

  void validate() const;
  std::string label() const;
};

DistributionSpec wishart_spec(int d, double a, Eigen::MatrixXd sigma);
DistributionSpec inv_wishart_spec(int d, double a, Eigen::MatrixXd sigma);
/// n_vec = 0 selects the default 2(d+1).
DistributionSpec cov_uniform_spec(int d, int n_vec = 0);
DistributionSpec cov_t_spec(int d, double a, Eigen::MatrixXd sigma, int n_vec = 0);

SpdMatrix sample_wishart(const DistributionSpec& spec, Rng& rng);
SpdMatrix sample_inv_wishart(const DistributionSpec& spec, Rng& rng);
SpdMatrix sample_cov_uniform(const DistributionSpec& spec, Rng& rng);
SpdMatrix sample_cov_t(const DistributionSpec& spec, Rng& rng);

/// Dispatches on spec.family.
SpdMatrix sample(const DistributionSpec& spec, Rng& rng);

/// E[X]; throws DomainError when the mean does not exist.
Eigen::MatrixXd expected_value(const DistributionSpec& spec);

/// Standard Wishart draw with real degrees of freedom dof > d-1 and scale
/// L L^T, by the Bartlett decomposition. `scale_chol` is the lower factor L.
Eigen::MatrixXd bartlett_wishart(double dof, const Eigen::MatrixXd& scale_chol, Rng& rng);

/// Parses {"family":..., "d":..., "a":..., "sigma":[[...]], "n_vec":...}.
/// "sigma" may be a matrix or a number c meaning c·I and defaults to I;
/// n_vec defaults to 2(d+1) and "parametrization" (wishart only) to
/// "density". Errors name the JSON pointer below `where`.
DistributionSpec distribution_from_json(const nlohmann::json& j, const std::string& where = "");
nlohmann::json to_json(const DistributionSpec& spec);

}  // namespace hankelcp

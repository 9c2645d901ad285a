#pragma once

// CUSUM-max change-point statistic over a cached Gram matrix.
//
// For a split after the first k of n elements the bracket is the squared
// distance between the two empirical transforms,
//
//   bracket(k) = A/k^2 + B/(n-k)^2 - 2 C/(k (n-k)),
//
// with A, B the within-block sums (diagonal included) and C the cross sum,
// and the weighted value is (k(n-k)/n^2)^γ · (k(n-k)/n) · bracket(k).

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "json.hpp"

#include "hankelcp/kernel.hpp"

namespace hankelcp {

struct StatConfig {
  double gamma = 0.5;

  void validate() const;
};

struct StatProfile {
  int n = 0;
  double gamma = 0.5;
  std::vector<double> bracket;   // index k-1 for k = 1..n-1
  std::vector<double> weighted;  // index k-1
  double max_value = 0.0;
  int argmax_k = 0;
};

struct StatMax {
  double value = 0.0;
  int k_hat = 0;
};

/// Full profile in O(n^2) from prefix sums; no kernel evaluations.
StatProfile statistic_profile(const KernelGram& gram, const StatConfig& cfg);

/// Profile of the sequence H[order[0]], ..., H[order[len-1]]: a relabeled
/// sample or a principal sub-block, read by index from the same Gram.
StatProfile statistic_profile(const Eigen::MatrixXd& values, std::span<const int> order,
                              const StatConfig& cfg);

/// Maximum of the weighted profile only; cheaper than materializing it.
StatMax statistic_value(const Eigen::MatrixXd& values, std::span<const int> order,
                        const StatConfig& cfg);

/// Bracket at split k (1 <= k <= n-1).
double two_sample_bracket(const KernelGram& gram, int k);

/// (max weighted value, smallest maximizing k).
StatMax statistic_max(const StatProfile& profile);

/// c_{n,k}(γ) = (k(n-k)/n^2)^γ.
double split_weight(int n, int k, double gamma);

nlohmann::json to_json(const StatProfile& profile);

}  // namespace hankelcp

#pragma once

// Kernel h(x, y) = etr(-x - y) J_ν(-x, y) and its Gram matrix.
//
// h has the explicit feature expansion h(x, y) = Σ_κ ψ_κ(x) ψ_κ(y) with
// ψ_κ(x) = exp(-tr x) C_κ(x) / sqrt(k! (b)_κ C_κ(I)), all terms nonnegative.
// The Gram matrix is built from these features, which keeps it exactly
// symmetric and positive semidefinite up to rounding.
//
// The kernel is not scale invariant. KernelConfig::scale multiplies every
// matrix of a sample; any preprocessing must be applied to all sample
// elements alike or permutation p-values lose their validity.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hankelcp/spd_matrix.hpp"
#include "hankelcp/specfun.hpp"

namespace hankelcp {

struct KernelConfig {
  double nu = 1.0;
  TruncationPolicy truncation{};
  double scale = 1.0;

  void validate(int dim) const;
};

struct KernelValue {
  double value = 0.0;
  bool converged = false;
};

/// h(x, y), computed from the eigenvalues of x and y.
KernelValue kernel_h(const SpdMatrix& x, const SpdMatrix& y, const KernelConfig& cfg = {});

/// Feature vector of one matrix, grouped by degree.
struct KernelFeatures {
  std::vector<double> values;
  std::vector<std::size_t> layer_end;  // values[layer_end[k-1] .. layer_end[k]) is degree k
  int self_degree = 0;                 // degree at which h(x, x) met the quiet criterion
  bool converged = false;

  int degree() const { return static_cast<int>(layer_end.size()) - 1; }
};

/// Computes ψ(x) degree by degree until the h(x, x) series is quiet (or max_degree).
KernelFeatures kernel_features(const SpdMatrix& x, const KernelConfig& cfg);
/// Extends `features` with degrees up to `degree` inclusive.
void extend_features(KernelFeatures& features, const SpdMatrix& x, const KernelConfig& cfg,
                     int degree);

class KernelGram {
 public:
  KernelGram() = default;
  KernelGram(Eigen::MatrixXd values, std::vector<std::uint8_t> truncated, KernelConfig cfg,
             int degree);

  int n() const { return static_cast<int>(values_.rows()); }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }
  const KernelConfig& config() const { return config_; }
  /// Highest series degree summed for every entry.
  int degree() const { return degree_; }
  bool truncated(int i, int j) const { return truncated_[static_cast<std::size_t>(i * n() + j)] != 0; }
  std::size_t truncated_count() const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::uint8_t> truncated_;
  KernelConfig config_;
  int degree_ = 0;
};

/// Gram matrix H[i][j] = h(X_i, X_j). Entries sum series layers up to the
/// largest degree any single h(X_i, X_i) needs; an entry is flagged as
/// truncated when either of its matrices hit max_degree unconverged.
KernelGram gram(std::span<const SpdMatrix> sample, const KernelConfig& cfg = {});

/// Kernel evaluations performed so far in this process (kernel_h calls plus
/// Gram entries). For checking that resampling never re-evaluates the kernel.
std::uint64_t kernel_evaluation_count();

}  // namespace hankelcp

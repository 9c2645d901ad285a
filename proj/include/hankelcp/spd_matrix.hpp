#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace hankelcp {

/// Symmetric positive-semidefinite matrix with its spectrum cached at construction.
///
/// Accepts entries symmetric within 1e-10 (relative to the largest entry)
/// and eigenvalues no lower than -1e-10 * trace; such tiny negative
/// eigenvalues are reported as zero.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Eigen::MatrixXd entries);

  static SpdMatrix diagonal(std::span<const double> values);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  /// Descending, clamped at zero.
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double trace() const { return entries_.trace(); }

  SpdMatrix scaled(double factor) const;

 private:
  Eigen::MatrixXd entries_;
  std::vector<double> eigenvalues_;
};

}  // namespace hankelcp

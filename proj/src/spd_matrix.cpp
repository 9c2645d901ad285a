#include "hankelcp/spd_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hankelcp/error.hpp"

namespace hankelcp {

SpdMatrix::SpdMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw InputError("SPD matrix must be square and nonempty");
  if (!entries_.allFinite()) throw InputError("SPD matrix has non-finite entries");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InputError("matrix is not symmetric");
  entries_ = 0.5 * (entries_ + entries_.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InputError("eigen decomposition failed");
  const auto& ev = solver.eigenvalues();
  const double floor = -1e-10 * std::max(entries_.trace(), 0.0);
  eigenvalues_.assign(ev.data(), ev.data() + ev.size());
  std::sort(eigenvalues_.begin(), eigenvalues_.end(), std::greater<>());
  for (double& v : eigenvalues_) {
    if (v < floor && v < 0.0) throw InputError("matrix is not positive semidefinite");
    v = std::max(v, 0.0);
  }
}

SpdMatrix SpdMatrix::diagonal(std::span<const double> values) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) d(static_cast<Eigen::Index>(i)) = values[i];
  return SpdMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SpdMatrix SpdMatrix::scaled(double factor) const {
  if (!(factor > 0.0)) throw InputError("scale factor must be positive");
  SpdMatrix out = *this;
  out.entries_ *= factor;
  for (double& v : out.eigenvalues_) v *= factor;
  return out;
}

}  // namespace hankelcp

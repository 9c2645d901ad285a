#include "hankelcp/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "hankelcp/error.hpp"
#include "hankelcp/parallel.hpp"

namespace hankelcp {

namespace {

std::atomic<std::uint64_t> g_evaluations{0};

std::vector<double> scaled_eigenvalues(const SpdMatrix& x, double scale) {
  std::vector<double> eigs = x.eigenvalues();
  for (double& v : eigs) v *= scale;
  return eigs;
}

void append_layers(KernelFeatures& f, const BesselSeries& series, std::span<const double> eigs,
                   int up_to, bool stop_when_quiet) {
  std::vector<double> unit(eigs.begin(), eigs.end());
  double trace = 0.0;
  for (double v : unit) trace += v;
  if (trace > 0.0)
    for (double& v : unit) v /= trace;
  const double log_trace = trace > 0.0 ? std::log(trace) : 0.0;

  ZonalEvaluator eval(series.table(), unit);
  std::vector<double> c;
  const auto& policy = series.policy();
  double total = 0.0;
  for (double v : f.values) total += v * v;
  int quiet = 0;
  for (int k = f.degree() + 1; k <= up_to; ++k) {
    double layer = 0.0;
    if (k == 0) {
      const double psi = std::exp(-trace);
      f.values.push_back(psi);
      layer = psi * psi;
    } else {
      const auto w = series.log_weights(k);
      if (trace > 0.0) {
        eval.evaluate(k, c);
        for (std::size_t a = 0; a < w.size(); ++a) {
          const double psi =
              c[a] > 0.0 ? std::exp(-trace + k * log_trace + 0.5 * w[a]) * c[a] : 0.0;
          f.values.push_back(psi);
          layer += psi * psi;
        }
      } else {
        f.values.insert(f.values.end(), w.size(), 0.0);
      }
    }
    f.layer_end.push_back(f.values.size());
    total += layer;
    if (!stop_when_quiet) continue;
    quiet = layer <= policy.rel_tol * total ? quiet + 1 : 0;
    if (quiet >= policy.consecutive_quiet_layers) {
      f.converged = true;
      f.self_degree = k;
      return;
    }
  }
  if (stop_when_quiet) f.self_degree = f.degree();
}

}  // namespace

void KernelConfig::validate(int dim) const {
  validate_bessel_order(nu, dim);
  truncation.validate();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InputError("kernel scale must be positive");
}

KernelValue kernel_h(const SpdMatrix& x, const SpdMatrix& y, const KernelConfig& cfg) {
  if (x.dim() != y.dim())
    throw InputError("kernel_h: dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                     std::to_string(y.dim()) + ")");
  cfg.validate(x.dim());
  const auto series = BesselSeries::shared(x.dim(), cfg.nu, cfg.truncation);
  const auto ex = scaled_eigenvalues(x, cfg.scale);
  const auto ey = scaled_eigenvalues(y, cfg.scale);
  double tx = 0.0, ty = 0.0;
  for (double v : ex) tx += v;
  for (double v : ey) ty += v;
  const auto sums = series->layer_sums(ex, ey, -tx - ty);
  g_evaluations.fetch_add(1, std::memory_order_relaxed);
  return {sums.total(), sums.converged};
}

KernelFeatures kernel_features(const SpdMatrix& x, const KernelConfig& cfg) {
  cfg.validate(x.dim());
  const auto series = BesselSeries::shared(x.dim(), cfg.nu, cfg.truncation);
  KernelFeatures f;
  append_layers(f, *series, scaled_eigenvalues(x, cfg.scale), cfg.truncation.max_degree, true);
  return f;
}

void extend_features(KernelFeatures& features, const SpdMatrix& x, const KernelConfig& cfg,
                     int degree) {
  if (degree <= features.degree()) return;
  const auto series = BesselSeries::shared(x.dim(), cfg.nu, cfg.truncation);
  append_layers(features, *series, scaled_eigenvalues(x, cfg.scale), degree, false);
}

KernelGram::KernelGram(Eigen::MatrixXd values, std::vector<std::uint8_t> truncated,
                       KernelConfig cfg, int degree)
    : values_(std::move(values)),
      truncated_(std::move(truncated)),
      config_(cfg),
      degree_(degree) {}

std::size_t KernelGram::truncated_count() const {
  return static_cast<std::size_t>(std::count(truncated_.begin(), truncated_.end(), 1));
}

KernelGram gram(std::span<const SpdMatrix> sample, const KernelConfig& cfg) {
  if (sample.empty()) throw InputError("gram: empty sample");
  const int dim = sample.front().dim();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample[i].dim() != dim)
      throw InputError("gram: matrix " + std::to_string(i) + " has dimension " +
                       std::to_string(sample[i].dim()) + ", expected " + std::to_string(dim));
  }
  cfg.validate(dim);

  const std::size_t n = sample.size();
  std::vector<KernelFeatures> features(n);
  parallel_for(n, [&](std::size_t i) { features[i] = kernel_features(sample[i], cfg); });
  int degree = 0;
  for (const auto& f : features) degree = std::max(degree, f.degree());
  parallel_for(n, [&](std::size_t i) { extend_features(features[i], sample[i], cfg, degree); });

  const auto length = static_cast<Eigen::Index>(features.front().values.size());
  Eigen::MatrixXd psi(length, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    psi.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(features[i].values.data(), length);

  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd values(nn, nn);
  parallel_for(n, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i; j < nn; ++j) values(i, j) = psi.col(i).dot(psi.col(j));
  });
  for (Eigen::Index i = 0; i < nn; ++i)
    for (Eigen::Index j = 0; j < i; ++j) values(i, j) = values(j, i);

  std::vector<std::uint8_t> truncated(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      truncated[i * n + j] = !features[i].converged || !features[j].converged;

  g_evaluations.fetch_add(n * (n + 1) / 2, std::memory_order_relaxed);
  return KernelGram(std::move(values), std::move(truncated), cfg, degree);
}

std::uint64_t kernel_evaluation_count() { return g_evaluations.load(); }

}  // namespace hankelcp

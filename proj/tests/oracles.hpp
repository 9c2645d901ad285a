#pragma once

// Reference implementations used only by the tests. They share no code with
// the library and favour plainness over speed.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// I_ν(z) by its power series, summed in logs.
inline double bessel_i(double nu, double z) {
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double lz = std::log(0.5 * z);
  double sum = 0.0;
  for (int j = 0; j < 400; ++j) {
    const double term = std::exp((2.0 * j + nu) * lz - std::lgamma(j + 1.0) - std::lgamma(j + nu + 1.0));
    sum += term;
    if (j > 2.0 * z && term < 1e-18 * sum) break;
  }
  return sum;
}

/// h(x, y) for 1x1 matrices: e^{-x-y} Γ(ν+1) (xy)^{-ν/2} I_ν(2 sqrt(xy)).
inline double scalar_kernel(double nu, double x, double y) {
  if (x * y == 0.0) return std::exp(-x - y);
  const double lg = std::lgamma(nu + 1.0) - 0.5 * nu * std::log(x * y);
  return std::exp(-x - y + lg) * bessel_i(nu, 2.0 * std::sqrt(x * y));
}

inline double rising(double a, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= a + i;
  return r;
}

/// Unnormalized two-variable zonal polynomial: (x1 x2)^k2 g_{k1-k2}(x1, x2) with
/// g_d = Σ_j (1/2)_j (1/2)_{d-j} / (j! (d-j)!) x1^j x2^(d-j).
inline double zonal2_shape(int k1, int k2, double x1, double x2) {
  const int d = k1 - k2;
  double g = 0.0;
  for (int j = 0; j <= d; ++j)
    g += rising(0.5, j) * rising(0.5, d - j) / (std::tgamma(j + 1.0) * std::tgamma(d - j + 1.0)) *
         std::pow(x1, j) * std::pow(x2, d - j);
  return std::pow(x1 * x2, k2) * g;
}

/// Constants c_κ with Σ_κ c_κ shape_κ(x) = (x1 + x2)^k. Matching the
/// coefficients of x1^(k-r) x2^r for r = 0, 1, ... gives a triangular system.
/// Index i is κ = (k - i, i).
inline std::vector<double> zonal2_constants(int k) {
  const int count = k / 2 + 1;
  auto coefficient = [k](int i, int r) {  // of x1^(k-r) x2^r in shape_(k-i,i)
    const int d = k - 2 * i, j = k - r - i;
    if (j < 0 || j > d) return 0.0;
    return rising(0.5, j) * rising(0.5, d - j) / (std::tgamma(j + 1.0) * std::tgamma(d - j + 1.0));
  };
  std::vector<double> c(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    double rhs = std::tgamma(k + 1.0) / (std::tgamma(r + 1.0) * std::tgamma(k - r + 1.0));
    for (int i = 0; i < r; ++i) rhs -= c[static_cast<std::size_t>(i)] * coefficient(i, r);
    c[static_cast<std::size_t>(r)] = rhs / coefficient(r, r);
  }
  return c;
}

inline double zonal2(int k1, int k2, double x1, double x2) {
  return zonal2_constants(k1 + k2)[static_cast<std::size_t>(k2)] * zonal2_shape(k1, k2, x1, x2);
}

/// Two-sample bracket at split k by direct summation.
inline double bracket(const Eigen::MatrixXd& h, int k) {
  const int n = static_cast<int>(h.rows());
  double a = 0.0, b = 0.0, c = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a += h(i, j);
  for (int i = k; i < n; ++i)
    for (int j = k; j < n; ++j) b += h(i, j);
  for (int i = 0; i < k; ++i)
    for (int j = k; j < n; ++j) c += h(i, j);
  const double kd = k, rd = n - k;
  return a / (kd * kd) + b / (rd * rd) - 2.0 * c / (kd * rd);
}

/// Weighted profile by the triple loop, index k-1.
inline std::vector<double> weighted_profile(const Eigen::MatrixXd& h, double gamma) {
  const int n = static_cast<int>(h.rows());
  std::vector<double> out;
  for (int k = 1; k < n; ++k) {
    const double share = static_cast<double>(k) * (n - k);
    out.push_back(std::pow(share / (double(n) * n), gamma) * share / n * bracket(h, k));
  }
  return out;
}

/// Random PSD matrix F F^T with F n x r standard normal.
inline Eigen::MatrixXd random_gram(int n, int r, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd f(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) f(i, j) = z(rng);
  return f * f.transpose();
}

/// Kolmogorov-Smirnov p-value of a sample against a continuous CDF.
template <class Cdf>
double ks_pvalue(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int k = 1; k < 200; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

inline double chi2_1_cdf(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x)); }

inline double chi2_3_cdf(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(std::sqrt(0.5 * x)) - std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-0.5 * x);
}

}  // namespace oracle

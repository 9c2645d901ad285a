#pragma once

// Special functions of matrix argument: multivariate gamma, partitions,
// generalized Pochhammer symbols, zonal polynomials (Jack alpha = 2,
// C-normalization) and the two-matrix Bessel series
//
//   J_nu(-X, Y) = sum_k sum_{kappa |- k} C_k(X) C_k(Y) / (k! (b)_k C_k(I_m)),
//   b = nu + (m + 1) / 2,
//
// which is 0F1(b; X, Y). Every term is nonnegative for PSD arguments.
// All routines consume eigenvalues only.

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace hankelcp {

/// Weakly decreasing list of positive integers.
class Partition {
 public:
  Partition() = default;
  /// Throws InputError unless `parts` is weakly decreasing and positive.
  explicit Partition(std::vector<int> parts);
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

  const std::vector<int>& parts() const { return parts_; }
  std::size_t length() const { return parts_.size(); }
  int weight() const { return weight_; }
  int operator[](std::size_t i) const { return parts_[i]; }

  bool operator==(const Partition&) const = default;
  auto operator<=>(const Partition&) const = default;

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

/// True when `lhs` is dominated by `rhs` (equal weights, partial sums of lhs <= rhs).
bool dominated_by(const Partition& lhs, const Partition& rhs);

struct TruncationPolicy {
  int max_degree = 60;
  double rel_tol = 1e-12;
  int consecutive_quiet_layers = 2;

  void validate() const;
};

/// Multivariate gamma Γ_m(a) = π^{m(m-1)/4} ∏_{i=1}^{m} Γ(a - (i-1)/2). Requires a > (m-1)/2.
double mv_gamma(double a, int m);
double log_mv_gamma(double a, int m);

/// All partitions of k with at most `max_parts` parts, descending lexicographic order.
std::vector<Partition> partitions_of_degree(int k, int max_parts);

/// (a)_κ = ∏_i (a - (i-1)/2)_{κ_i}.
double gen_pochhammer(double a, const Partition& kappa);

/// Closed form of C_κ(I_m) in log scale. Requires length(κ) <= m.
double log_zonal_at_identity(const Partition& kappa, int m);

/// One degree of the zonal table: partitions of k (<= m parts) and the
/// monomial expansion C_κ = Σ_λ c_{κλ} M_λ restricted to λ with <= m parts.
struct ZonalLayer {
  struct Term {
    int lambda;
    double coefficient;
  };

  int degree = 0;
  std::vector<Partition> partitions;
  std::vector<std::vector<Term>> expansion;
  std::vector<double> log_identity;  // log C_κ(I_m)
  // Distinct exponent arrangements of each λ padded to m, flattened
  // (m ints per arrangement); arrangement_offsets has size partitions+1.
  std::vector<int> arrangements;
  std::vector<std::size_t> arrangement_offsets;
};

namespace detail {

// Append-only sequence of per-degree layers built on first access. Layers
// never move once built, so readers may keep references across threads.
template <class T>
class LazyLayers {
 public:
  LazyLayers(std::function<T(int)> build, int capacity)
      : build_(std::move(build)), layers_(static_cast<std::size_t>(capacity) + 1) {}

  int capacity() const { return static_cast<int>(layers_.size()) - 1; }

  const T& at(int k) const {
    if (k < built_.load(std::memory_order_acquire)) return *layers_[k];
    std::lock_guard lock(mutex_);
    int built = built_.load(std::memory_order_relaxed);
    while (built <= k) {
      layers_[built] = std::make_unique<T>(build_(built));
      built_.store(++built, std::memory_order_release);
    }
    return *layers_[k];
  }

 private:
  std::function<T(int)> build_;
  mutable std::vector<std::unique_ptr<T>> layers_;
  mutable std::atomic<int> built_{0};
  mutable std::mutex mutex_;
};

}  // namespace detail

/// Zonal polynomial coefficient tables for a fixed number of variables m.
///
/// Coefficients come from the Laplace-Beltrami eigen-equation recurrence
///   c_{κλ} (ρ_κ - ρ_λ) = Σ_{i<j} Σ_{t=1}^{λ_j} (λ_i - λ_j + 2t) c_{κμ},
///   μ = sort(λ with λ_i += t, λ_j -= t),  ρ_κ = Σ κ_i (κ_i - i),
/// started at c_{κκ} = 1 and rescaled so C_κ(I_m) matches its closed form.
/// Layers are built lazily and are immutable afterwards.
class ZonalTable {
 public:
  static constexpr int kMaxDegree = 400;

  explicit ZonalTable(int m);

  /// Process-wide table for m variables.
  static std::shared_ptr<const ZonalTable> shared(int m);

  int dim() const { return m_; }
  const ZonalLayer& layer(int k) const;

 private:
  ZonalLayer build(int k) const;

  int m_;
  detail::LazyLayers<ZonalLayer> layers_;
};

/// Evaluates C_κ(x) for all κ of successive degrees at a fixed point x.
class ZonalEvaluator {
 public:
  ZonalEvaluator(const ZonalTable& table, std::span<const double> x);

  /// C_κ(x) for every partition of layer k, in layer order.
  void evaluate(int k, std::vector<double>& out);

 private:
  const ZonalTable& table_;
  std::vector<double> x_;
  std::vector<std::vector<double>> powers_;  // powers_[i][e] = x_i^e
  std::vector<double> monomials_;
};

/// C_κ evaluated at the diagonal matrix of `eigenvalues` (0 when length(κ) > m).
double zonal_c(const Partition& kappa, std::span<const double> eigenvalues);

struct LayerSums {
  std::vector<double> layers;
  bool converged = false;

  double total() const;
};

/// Per-(m, ν) constants of the Bessel series and the series evaluators.
class BesselSeries {
 public:
  BesselSeries(int m, double nu, TruncationPolicy policy = {});

  static std::shared_ptr<const BesselSeries> shared(int m, double nu,
                                                    const TruncationPolicy& policy);

  int dim() const { return table_->dim(); }
  double nu() const { return nu_; }
  const TruncationPolicy& policy() const { return policy_; }
  const ZonalTable& table() const { return *table_; }

  /// log(1 / (k! (b)_κ C_κ(I_m))) for each partition of layer k.
  std::span<const double> log_weights(int k) const;

  /// Degree layers of exp(log_prefactor) · J_ν(-X, Y) from the eigenvalues
  /// of X and Y (both nonnegative). Stops after `consecutive_quiet_layers`
  /// layers below rel_tol × running total, or at max_degree unconverged.
  LayerSums layer_sums(std::span<const double> eigs_x, std::span<const double> eigs_y,
                       double log_prefactor = 0.0) const;

 private:
  std::shared_ptr<const ZonalTable> table_;
  double nu_;
  TruncationPolicy policy_;
  detail::LazyLayers<std::vector<double>> weights_;
};

/// Layer sums of Γ_m(ν + (m+1)/2) A_ν(-X, Y). Callers pass the eigenvalues of
/// X itself; the sign of the first argument cancels against C_κ(-X) = (-1)^k C_κ(X).
LayerSums bessel_layer_sums(double nu, std::span<const double> eigs_x,
                            std::span<const double> eigs_y, const TruncationPolicy& policy = {});

struct BesselValue {
  double value = 0.0;
  bool converged = false;
};

/// J_ν(-S, T) = Σ of the layer sums.
BesselValue two_matrix_bessel_j(double nu, std::span<const double> s_eigs,
                                std::span<const double> t_eigs,
                                const TruncationPolicy& policy = {});

/// Throws DomainError unless ν > (m-2)/2.
void validate_bessel_order(double nu, int m);

}  // namespace hankelcp

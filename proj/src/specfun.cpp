#include "hankelcp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <tuple>

#include "hankelcp/error.hpp"

namespace hankelcp {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 1) throw InputError("partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw InputError("partition parts must be weakly decreasing");
    weight_ += parts_[i];
  }
}

bool dominated_by(const Partition& lhs, const Partition& rhs) {
  if (lhs.weight() != rhs.weight()) return false;
  int sl = 0, sr = 0;
  for (std::size_t i = 0; i < lhs.length(); ++i) {
    sl += lhs[i];
    sr += i < rhs.length() ? rhs[i] : 0;
    if (sl > sr) return false;
  }
  return true;
}

void TruncationPolicy::validate() const {
  if (max_degree < 1 || max_degree > ZonalTable::kMaxDegree)
    throw InputError("max_degree must lie in [1, " + std::to_string(ZonalTable::kMaxDegree) + "]");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InputError("rel_tol must lie in (0, 1)");
  if (consecutive_quiet_layers < 1) throw InputError("consecutive_quiet_layers must be >= 1");
}

double log_mv_gamma(double a, int m) {
  if (m < 1) throw DomainError("mv_gamma: dimension must be positive");
  if (!(a > 0.5 * (m - 1)))
    throw DomainError("mv_gamma: argument must exceed (m-1)/2");
  double sum = 0.25 * m * (m - 1) * std::log(std::numbers::pi);
  for (int i = 1; i <= m; ++i) sum += std::lgamma(a - 0.5 * (i - 1));
  return sum;
}

double mv_gamma(double a, int m) {
  if (m < 1) throw DomainError("mv_gamma: dimension must be positive");
  if (!(a > 0.5 * (m - 1)))
    throw DomainError("mv_gamma: argument must exceed (m-1)/2");
  double prod = std::pow(std::numbers::pi, 0.25 * m * (m - 1));
  for (int i = 1; i <= m; ++i) prod *= std::tgamma(a - 0.5 * (i - 1));
  return prod;
}

namespace {

void enumerate_partitions(int remaining, int max_part, int parts_left, std::vector<int>& current,
                          std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(current);
    return;
  }
  if (parts_left == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    // the remaining parts_left - 1 parts can absorb at most p each
    if (static_cast<long>(p) * parts_left < remaining) break;
    current.push_back(p);
    enumerate_partitions(remaining - p, p, parts_left - 1, current, out);
    current.pop_back();
  }
}

double log_rising(double a, int n) { return std::lgamma(a + n) - std::lgamma(a); }

int rho(const Partition& p) {
  int r = 0;
  for (std::size_t i = 0; i < p.length(); ++i) r += p[i] * (p[i] - static_cast<int>(i) - 1);
  return r;
}

}  // namespace

std::vector<Partition> partitions_of_degree(int k, int max_parts) {
  if (k < 0) throw DomainError("partitions_of_degree: negative degree");
  if (max_parts < 1) throw DomainError("partitions_of_degree: max_parts must be positive");
  std::vector<Partition> out;
  std::vector<int> current;
  enumerate_partitions(k, k, max_parts, current, out);
  return out;
}

double gen_pochhammer(double a, const Partition& kappa) {
  double prod = 1.0;
  for (std::size_t i = 0; i < kappa.length(); ++i) {
    const double base = a - 0.5 * static_cast<double>(i);
    for (int j = 0; j < kappa[i]; ++j) prod *= base + j;
  }
  return prod;
}

double log_zonal_at_identity(const Partition& kappa, int m) {
  const int l = static_cast<int>(kappa.length());
  if (l > m) throw DomainError("C_kappa(I_m) vanishes for more than m parts");
  const int k = kappa.weight();
  double log_value = 2.0 * k * std::numbers::ln2 + std::lgamma(k + 1.0);
  for (int i = 0; i < l; ++i) {
    log_value += log_rising(0.5 * m - 0.5 * i, kappa[i]);
    log_value -= std::lgamma(2.0 * kappa[i] + l - (i + 1) + 1.0);
    for (int j = i + 1; j < l; ++j)
      log_value += std::log(2.0 * (kappa[i] - kappa[j]) - (i + 1) + (j + 1));
  }
  return log_value;
}

ZonalTable::ZonalTable(int m)
    : m_(m), layers_([this](int k) { return build(k); }, kMaxDegree) {
  if (m < 1) throw DomainError("zonal table dimension must be positive");
}

std::shared_ptr<const ZonalTable> ZonalTable::shared(int m) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ZonalTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_shared<const ZonalTable>(m);
  return slot;
}

const ZonalLayer& ZonalTable::layer(int k) const {
  if (k < 0 || k > kMaxDegree) throw DomainError("zonal degree out of range");
  return layers_.at(k);
}

ZonalLayer ZonalTable::build(int k) const {
  ZonalLayer layer;
  layer.degree = k;
  layer.partitions = partitions_of_degree(k, m_);
  const auto& parts = layer.partitions;
  const std::size_t count = parts.size();

  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < count; ++i) index.emplace(parts[i].parts(), static_cast<int>(i));

  // Exponent arrangements, used both for monomial evaluation and for M_λ(1^m).
  layer.arrangement_offsets.push_back(0);
  for (const auto& p : parts) {
    std::vector<int> padded(p.parts());
    padded.resize(static_cast<std::size_t>(m_), 0);
    std::sort(padded.begin(), padded.end());
    do {
      layer.arrangements.insert(layer.arrangements.end(), padded.begin(), padded.end());
    } while (std::next_permutation(padded.begin(), padded.end()));
    layer.arrangement_offsets.push_back(layer.arrangements.size());
  }

  // Raising moves depend on λ only: λ_i += t, λ_j -= t for i < j.
  struct Raise {
    int mu;
    double coefficient;
  };
  std::vector<std::vector<Raise>> raises(count);
  for (std::size_t b = 0; b < count; ++b) {
    const auto& lam = parts[b].parts();
    for (std::size_t i = 0; i < lam.size(); ++i) {
      for (std::size_t j = i + 1; j < lam.size(); ++j) {
        for (int t = 1; t <= lam[j]; ++t) {
          std::vector<int> mu(lam);
          mu[i] += t;
          mu[j] -= t;
          std::sort(mu.begin(), mu.end(), std::greater<>());
          while (!mu.empty() && mu.back() == 0) mu.pop_back();
          raises[b].push_back({index.at(mu), static_cast<double>(lam[i] - lam[j] + 2 * t)});
        }
      }
    }
  }

  std::vector<int> rhos(count);
  for (std::size_t i = 0; i < count; ++i) rhos[i] = rho(parts[i]);

  layer.expansion.resize(count);
  layer.log_identity.resize(count);
  std::vector<double> c(count);
  for (std::size_t a = 0; a < count; ++a) {
    std::fill(c.begin(), c.end(), 0.0);
    c[a] = 1.0;
    for (std::size_t b = a + 1; b < count; ++b) {
      if (!dominated_by(parts[b], parts[a])) continue;
      double sum = 0.0;
      for (const auto& r : raises[b]) sum += r.coefficient * c[static_cast<std::size_t>(r.mu)];
      c[b] = sum / static_cast<double>(rhos[a] - rhos[b]);
    }
    double at_identity = 0.0;
    for (std::size_t b = a; b < count; ++b) {
      const auto arrangements =
          static_cast<double>(layer.arrangement_offsets[b + 1] - layer.arrangement_offsets[b]) /
          m_;
      at_identity += c[b] * arrangements;
    }
    layer.log_identity[a] = log_zonal_at_identity(parts[a], m_);
    const double scale = std::exp(layer.log_identity[a] - std::log(at_identity));
    for (std::size_t b = a; b < count; ++b) {
      if (c[b] != 0.0) layer.expansion[a].push_back({static_cast<int>(b), c[b] * scale});
    }
  }
  return layer;
}

ZonalEvaluator::ZonalEvaluator(const ZonalTable& table, std::span<const double> x)
    : table_(table), x_(x.begin(), x.end()), powers_(x.size(), std::vector<double>{1.0}) {
  if (static_cast<int>(x.size()) != table.dim())
    throw InputError("zonal evaluation: argument length differs from table dimension");
}

void ZonalEvaluator::evaluate(int k, std::vector<double>& out) {
  const ZonalLayer& layer = table_.layer(k);
  for (std::size_t i = 0; i < x_.size(); ++i) {
    auto& pw = powers_[i];
    while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back() * x_[i]);
  }
  const std::size_t count = layer.partitions.size();
  const std::size_t m = x_.size();
  monomials_.assign(count, 0.0);
  for (std::size_t b = 0; b < count; ++b) {
    double sum = 0.0;
    for (std::size_t off = layer.arrangement_offsets[b]; off < layer.arrangement_offsets[b + 1];
         off += m) {
      double term = 1.0;
      for (std::size_t i = 0; i < m; ++i) term *= powers_[i][layer.arrangements[off + i]];
      sum += term;
    }
    monomials_[b] = sum;
  }
  out.assign(count, 0.0);
  for (std::size_t a = 0; a < count; ++a) {
    double sum = 0.0;
    for (const auto& term : layer.expansion[a])
      sum += term.coefficient * monomials_[static_cast<std::size_t>(term.lambda)];
    out[a] = sum;
  }
}

double zonal_c(const Partition& kappa, std::span<const double> eigenvalues) {
  const int m = static_cast<int>(eigenvalues.size());
  if (m < 1) throw InputError("zonal_c: at least one eigenvalue required");
  if (static_cast<int>(kappa.length()) > m) return 0.0;
  if (kappa.weight() == 0) return 1.0;
  const auto table = ZonalTable::shared(m);
  const auto& parts = table->layer(kappa.weight()).partitions;
  const auto it = std::find(parts.begin(), parts.end(), kappa);
  ZonalEvaluator eval(*table, eigenvalues);
  std::vector<double> values;
  eval.evaluate(kappa.weight(), values);
  return values[static_cast<std::size_t>(it - parts.begin())];
}

double LayerSums::total() const {
  double sum = 0.0;
  for (double v : layers) sum += v;
  return sum;
}

void validate_bessel_order(double nu, int m) {
  if (!(nu > 0.5 * (m - 2)))
    throw DomainError("Bessel order nu must exceed (m-2)/2 for dimension " + std::to_string(m));
}

BesselSeries::BesselSeries(int m, double nu, TruncationPolicy policy)
    : table_(ZonalTable::shared(m)),
      nu_(nu),
      policy_(policy),
      weights_(
          [this](int k) {
            const auto& layer = table_->layer(k);
            const double b = nu_ + 0.5 * (table_->dim() + 1);
            std::vector<double> w(layer.partitions.size());
            for (std::size_t a = 0; a < w.size(); ++a) {
              const auto& kappa = layer.partitions[a];
              double log_poch = 0.0;
              for (std::size_t i = 0; i < kappa.length(); ++i)
                log_poch += log_rising(b - 0.5 * static_cast<double>(i), kappa[i]);
              w[a] = -std::lgamma(k + 1.0) - log_poch - layer.log_identity[a];
            }
            return w;
          },
          ZonalTable::kMaxDegree) {
  validate_bessel_order(nu, m);
  policy_.validate();
}

std::shared_ptr<const BesselSeries> BesselSeries::shared(int m, double nu,
                                                         const TruncationPolicy& policy) {
  using Key = std::tuple<int, double, int, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const BesselSeries>> cache;
  const Key key{m, nu, policy.max_degree, policy.rel_tol, policy.consecutive_quiet_layers};
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const BesselSeries>(m, nu, policy);
  return slot;
}

std::span<const double> BesselSeries::log_weights(int k) const { return weights_.at(k); }

namespace {

// Splits nonnegative eigenvalues into their trace and the unit-trace direction.
double normalize(std::span<const double> eigs, std::vector<double>& unit) {
  unit.resize(eigs.size());
  double trace = 0.0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    unit[i] = std::max(eigs[i], 0.0);
    trace += unit[i];
  }
  if (trace > 0.0)
    for (double& v : unit) v /= trace;
  return trace;
}

}  // namespace

LayerSums BesselSeries::layer_sums(std::span<const double> eigs_x, std::span<const double> eigs_y,
                                   double log_prefactor) const {
  const auto m = static_cast<std::size_t>(dim());
  if (eigs_x.size() != m || eigs_y.size() != m)
    throw InputError("Bessel series: eigenvalue lists must have the series dimension");

  std::vector<double> ux, uy;
  const double tx = normalize(eigs_x, ux);
  const double ty = normalize(eigs_y, uy);
  const bool degenerate = tx == 0.0 || ty == 0.0;
  const double log_st = degenerate ? 0.0 : std::log(tx) + std::log(ty);

  ZonalEvaluator ex(*table_, ux), ey(*table_, uy);
  std::vector<double> cx, cy;
  LayerSums out;
  double total = 0.0;
  int quiet = 0;
  for (int k = 0; k <= policy_.max_degree; ++k) {
    double layer = 0.0;
    if (k == 0) {
      layer = std::exp(log_prefactor);
    } else if (!degenerate) {
      const auto w = log_weights(k);
      ex.evaluate(k, cx);
      ey.evaluate(k, cy);
      for (std::size_t a = 0; a < w.size(); ++a) {
        const double prod = cx[a] * cy[a];
        if (prod > 0.0) layer += std::exp(log_prefactor + k * log_st + w[a]) * prod;
      }
    }
    out.layers.push_back(layer);
    total += layer;
    quiet = layer <= policy_.rel_tol * total ? quiet + 1 : 0;
    if (quiet >= policy_.consecutive_quiet_layers) {
      out.converged = true;
      break;
    }
  }
  return out;
}

LayerSums bessel_layer_sums(double nu, std::span<const double> eigs_x,
                            std::span<const double> eigs_y, const TruncationPolicy& policy) {
  if (eigs_x.size() != eigs_y.size() || eigs_x.empty())
    throw InputError("Bessel series: eigenvalue lists must be nonempty and of equal length");
  for (double v : eigs_x)
    if (v < 0.0) throw DomainError("Bessel series: eigenvalues must be nonnegative");
  for (double v : eigs_y)
    if (v < 0.0) throw DomainError("Bessel series: eigenvalues must be nonnegative");
  const auto series = BesselSeries::shared(static_cast<int>(eigs_x.size()), nu, policy);
  return series->layer_sums(eigs_x, eigs_y);
}

BesselValue two_matrix_bessel_j(double nu, std::span<const double> s_eigs,
                                std::span<const double> t_eigs, const TruncationPolicy& policy) {
  const auto sums = bessel_layer_sums(nu, s_eigs, t_eigs, policy);
  return {sums.total(), sums.converged};
}

}  // namespace hankelcp

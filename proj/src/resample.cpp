#include "hankelcp/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hankelcp/distributions.hpp"
#include "hankelcp/error.hpp"
#include "hankelcp/parallel.hpp"
#include "hankelcp/random.hpp"

namespace hankelcp {

std::string to_string(PValueMode mode) {
  return mode == PValueMode::add_one ? "add_one" : "paper_strict";
}

PValueMode parse_pvalue_mode(const std::string& text) {
  if (text == "add_one") return PValueMode::add_one;
  if (text == "paper_strict") return PValueMode::paper_strict;
  throw InputError("unknown p-value mode '" + text + "' (expected add_one or paper_strict)");
}

void ResampleConfig::validate() const {
  if (nb < 1) throw InputError("nb must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

namespace {

// n! when it does not exceed `cap`, otherwise 0.
std::uint64_t factorial_up_to(int n, std::uint64_t cap) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) {
    f *= static_cast<std::uint64_t>(i);
    if (f > cap) return 0;
  }
  return f;
}

// Tag for the stream used when the whole permutation group is enumerated.
constexpr std::uint64_t kEnumerationStream = ~std::uint64_t{0};

}  // namespace

PermutationSet sample_permutations(int n, int nb, std::uint64_t seed) {
  if (n < 1) throw InputError("sample_permutations: n must be positive");
  if (nb < 1) throw InputError("sample_permutations: nb must be at least 1");
  PermutationSet out;
  std::vector<int> identity(static_cast<std::size_t>(n));
  std::iota(identity.begin(), identity.end(), 0);

  const auto small = factorial_up_to(n, 4ULL * static_cast<std::uint64_t>(nb));
  if (small != 0) {
    std::vector<std::vector<int>> all;
    all.reserve(small);
    auto p = identity;
    do all.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    if (static_cast<std::uint64_t>(nb) <= small) {
      auto rng = make_stream(seed, {kEnumerationStream});
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(static_cast<std::size_t>(nb));
      out.permutations = std::move(all);
    } else {
      out.with_replacement = true;
      for (int i = 0; i < nb; ++i) {
        auto rng = make_stream(seed, {static_cast<std::uint64_t>(i)});
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        out.permutations.push_back(all[pick(rng)]);
      }
    }
    return out;
  }

  std::set<std::vector<int>> seen;
  out.permutations.reserve(static_cast<std::size_t>(nb));
  for (int i = 0; i < nb; ++i) {
    auto rng = make_stream(seed, {static_cast<std::uint64_t>(i)});
    auto p = identity;
    do std::shuffle(p.begin(), p.end(), rng);
    while (seen.contains(p));
    seen.insert(p);
    out.permutations.push_back(std::move(p));
  }
  return out;
}

double permutation_p_value(double observed, std::span<const double> null_stats, PValueMode mode) {
  if (null_stats.empty()) throw InputError("p-value needs a nonempty null sample");
  const auto nb = static_cast<double>(null_stats.size());
  if (mode == PValueMode::paper_strict) {
    const auto above = std::count_if(null_stats.begin(), null_stats.end(),
                                     [&](double v) { return v > observed; });
    return static_cast<double>(above) / nb;
  }
  const auto at_least = std::count_if(null_stats.begin(), null_stats.end(),
                                      [&](double v) { return v >= observed; });
  return (1.0 + static_cast<double>(at_least)) / (nb + 1.0);
}

double empirical_critical_value(std::vector<double> values, double alpha) {
  if (values.empty()) throw InputError("critical value of an empty sample");
  std::sort(values.begin(), values.end());
  const double position = (1.0 - alpha) * static_cast<double>(values.size());
  auto index = static_cast<std::size_t>(std::ceil(position - 1e-9));
  index = std::clamp<std::size_t>(index, 1, values.size());
  return values[index - 1];
}

DetectionResult permutation_pvalue(const KernelGram& gram, int start, int end,
                                   const StatConfig& stat_cfg, const ResampleConfig& rs_cfg) {
  stat_cfg.validate();
  rs_cfg.validate();
  if (start < 0 || end > gram.n() || start >= end)
    throw InputError("permutation test: invalid segment range");
  const int n = end - start;
  if (n < 4) throw InputError("permutation test needs at least 4 observations");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), start);
  const auto observed = statistic_value(gram.values(), order, stat_cfg);

  const auto perms = sample_permutations(n, rs_cfg.nb, rs_cfg.seed);
  DetectionResult r;
  r.null_stats.resize(perms.permutations.size());
  parallel_for(perms.permutations.size(), [&](std::size_t p) {
    std::vector<int> relabeled(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < relabeled.size(); ++i)
      relabeled[i] = start + perms.permutations[p][i];
    r.null_stats[p] = statistic_value(gram.values(), relabeled, stat_cfg).value;
  });
  r.statistic = observed.value;
  r.k_hat = observed.k_hat;
  r.p_value = permutation_p_value(observed.value, r.null_stats, rs_cfg.pvalue_mode);
  r.n = n;
  r.stat_config = stat_cfg;
  r.resample_config = rs_cfg;
  r.permutations_with_replacement = perms.with_replacement;
  return r;
}

DetectionResult permutation_pvalue(const KernelGram& gram, const StatConfig& stat_cfg,
                                   const ResampleConfig& rs_cfg) {
  return permutation_pvalue(gram, 0, gram.n(), stat_cfg, rs_cfg);
}

PowerResult warp_speed_power(const DistributionSpec& left, const DistributionSpec& right, int n,
                             int k, const StatConfig& stat_cfg, const KernelConfig& kernel_cfg,
                             const ResampleConfig& rs_cfg, int replicates) {
  left.validate();
  right.validate();
  if (left.d != right.d) throw InputError("warp-speed: distributions differ in dimension");
  if (k < 1 || k > n - 1) throw InputError("warp-speed: change location k must lie in [1, n-1]");
  if (replicates < 1) throw InputError("warp-speed: at least one replicate required");
  stat_cfg.validate();
  rs_cfg.validate();
  kernel_cfg.validate(left.d);

  PowerResult out;
  out.statistics.resize(static_cast<std::size_t>(replicates));
  out.permuted_statistics.resize(static_cast<std::size_t>(replicates));
  std::vector<std::size_t> truncated(static_cast<std::size_t>(replicates));
  parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t r) {
    auto rng = make_stream(rs_cfg.seed, {r});
    std::vector<SpdMatrix> pooled;
    pooled.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < k; ++i) pooled.push_back(sample(left, rng));
    for (int i = k; i < n; ++i) pooled.push_back(sample(right, rng));
    const auto g = gram(pooled, kernel_cfg);
    truncated[r] = g.truncated_count();

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    out.statistics[r] = statistic_value(g.values(), order, stat_cfg).value;
    std::shuffle(order.begin(), order.end(), rng);
    out.permuted_statistics[r] = statistic_value(g.values(), order, stat_cfg).value;
  });

  out.critical_value = empirical_critical_value(out.permuted_statistics, rs_cfg.alpha);
  const auto rejected = std::count_if(out.statistics.begin(), out.statistics.end(),
                                      [&](double v) { return v > out.critical_value; });
  out.rejection_rate = static_cast<double>(rejected) / replicates;
  out.truncated_entries = std::accumulate(truncated.begin(), truncated.end(), std::size_t{0});
  return out;
}

nlohmann::json to_json(const DetectionResult& result, bool include_null) {
  nlohmann::json j = {{"statistic", result.statistic},
                      {"k_hat", result.k_hat},
                      {"p_value", result.p_value},
                      {"n", result.n},
                      {"gamma", result.stat_config.gamma},
                      {"nb", result.resample_config.nb},
                      {"alpha", result.resample_config.alpha},
                      {"seed", result.resample_config.seed},
                      {"pvalue_mode", to_string(result.resample_config.pvalue_mode)},
                      {"permutations_with_replacement", result.permutations_with_replacement}};
  if (include_null) j["null_stats"] = result.null_stats;
  return j;
}

}  // namespace hankelcp

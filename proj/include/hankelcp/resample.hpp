#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hankelcp/cpstat.hpp"
#include "hankelcp/kernel.hpp"

namespace hankelcp {

struct DistributionSpec;

enum class PValueMode {
  add_one,       // (1 + #{null >= observed}) / (nb + 1)
  paper_strict,  // mean(null > observed)
};

std::string to_string(PValueMode mode);
PValueMode parse_pvalue_mode(const std::string& text);

struct ResampleConfig {
  int nb = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  PValueMode pvalue_mode = PValueMode::add_one;

  void validate() const;
};

struct PermutationSet {
  std::vector<std::vector<int>> permutations;
  bool with_replacement = false;  // nb exceeded n!, duplicates possible
};

/// nb uniformly random permutations of {0..n-1}. Permutation p is drawn from
/// its own stream derived from (seed, p); duplicates are redrawn from that
/// stream so the set is pairwise distinct whenever nb <= n!. For small n!
/// (<= 4 nb) the set is drawn without replacement from the full enumeration.
PermutationSet sample_permutations(int n, int nb, std::uint64_t seed);

struct DetectionResult {
  double statistic = 0.0;
  int k_hat = 0;
  double p_value = 1.0;
  std::vector<double> null_stats;
  int n = 0;
  StatConfig stat_config;
  ResampleConfig resample_config;
  bool permutations_with_replacement = false;
};

/// Permutation p-value of the observed ordering. Permuted statistics are
/// computed by relabeling Gram indices; the kernel is never re-evaluated.
DetectionResult permutation_pvalue(const KernelGram& gram, const StatConfig& stat_cfg,
                                   const ResampleConfig& rs_cfg);

/// Same test restricted to the principal sub-block [start, end) of the Gram.
DetectionResult permutation_pvalue(const KernelGram& gram, int start, int end,
                                   const StatConfig& stat_cfg, const ResampleConfig& rs_cfg);

double permutation_p_value(double observed, std::span<const double> null_stats, PValueMode mode);

/// Order statistic of 1-based index ceil((1 - alpha) * N) of the sorted values.
double empirical_critical_value(std::vector<double> values, double alpha);

struct PowerResult {
  double rejection_rate = 0.0;
  double critical_value = 0.0;
  std::vector<double> statistics;
  std::vector<double> permuted_statistics;
  std::size_t truncated_entries = 0;
};

/// Warp-speed bootstrap: every replicate draws k matrices from `left` and
/// n - k from `right`, computes the statistic of the pooled ordering and of
/// one random relabeling; the critical value is pooled over replicates.
/// Replicate r uses the stream derived from (seed, r).
PowerResult warp_speed_power(const DistributionSpec& left, const DistributionSpec& right, int n,
                             int k, const StatConfig& stat_cfg, const KernelConfig& kernel_cfg,
                             const ResampleConfig& rs_cfg, int replicates);

nlohmann::json to_json(const DetectionResult& result, bool include_null);

}  // namespace hankelcp

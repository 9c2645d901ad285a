#pragma once

// Multiple change points by recursive binary segmentation over one Gram matrix.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hankelcp/kernel.hpp"
#include "hankelcp/resample.hpp"

namespace hankelcp {

enum class SplitMode {
  paper_mid,       // halves at floor(n/2) whatever k* is
  at_changepoint,  // splits at the detected k*
};

std::string to_string(SplitMode mode);
SplitMode parse_split_mode(const std::string& text);

struct SegmentationConfig {
  int window = 10;
  int nb = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  double gamma = 0.5;
  SplitMode split_mode = SplitMode::paper_mid;
  PValueMode pvalue_mode = PValueMode::add_one;

  void validate() const;
};

/// One tested segment [start, end) (0-based, global indices).
struct SegmentNode {
  int start = 0;
  int end = 0;
  int depth = 0;
  double statistic = 0.0;
  int k_star = 0;  // global index of the first element after the split
  double p_value = 1.0;
  bool accepted = false;  // change point accepted, p <= alpha
};

struct ChangePointReport {
  std::vector<int> change_points;  // sorted, distinct
  std::vector<SegmentNode> nodes;  // depth-first, left before right
};

/// Segments shorter than max(window, 4) are not tested. Node [s, e) uses the
/// permutation stream derived from (seed, s, e).
ChangePointReport binary_segmentation(const KernelGram& gram, const SegmentationConfig& cfg);

nlohmann::json to_json(const ChangePointReport& report);

}  // namespace hankelcp

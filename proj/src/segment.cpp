#include "hankelcp/segment.hpp"

#include <algorithm>

#include "hankelcp/error.hpp"
#include "hankelcp/random.hpp"

namespace hankelcp {

std::string to_string(SplitMode mode) {
  return mode == SplitMode::paper_mid ? "paper_mid" : "at_changepoint";
}

SplitMode parse_split_mode(const std::string& text) {
  if (text == "paper_mid") return SplitMode::paper_mid;
  if (text == "at_changepoint") return SplitMode::at_changepoint;
  throw InputError("unknown split mode '" + text + "' (expected paper_mid or at_changepoint)");
}

void SegmentationConfig::validate() const {
  if (window < 2) throw InputError("window must be at least 2");
  StatConfig{gamma}.validate();
  ResampleConfig{nb, alpha, seed, pvalue_mode}.validate();
}

namespace {

void segment(const KernelGram& gram, const SegmentationConfig& cfg, int start, int end, int depth,
             ChangePointReport& report) {
  const int len = end - start;
  if (len < std::max(cfg.window, 4)) return;

  ResampleConfig rs{cfg.nb, cfg.alpha,
                    derive_seed(cfg.seed, {static_cast<std::uint64_t>(start),
                                           static_cast<std::uint64_t>(end)}),
                    cfg.pvalue_mode};
  const auto test = permutation_pvalue(gram, start, end, StatConfig{cfg.gamma}, rs);

  SegmentNode node;
  node.start = start;
  node.end = end;
  node.depth = depth;
  node.statistic = test.statistic;
  node.k_star = start + test.k_hat;
  node.p_value = test.p_value;
  node.accepted = test.p_value <= cfg.alpha;
  report.nodes.push_back(node);
  if (!node.accepted) return;

  report.change_points.push_back(node.k_star);
  const int split = cfg.split_mode == SplitMode::paper_mid ? start + len / 2 : node.k_star;
  segment(gram, cfg, start, split, depth + 1, report);
  segment(gram, cfg, split, end, depth + 1, report);
}

}  // namespace

ChangePointReport binary_segmentation(const KernelGram& gram, const SegmentationConfig& cfg) {
  cfg.validate();
  ChangePointReport report;
  segment(gram, cfg, 0, gram.n(), 0, report);
  auto& cps = report.change_points;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return report;
}

nlohmann::json to_json(const ChangePointReport& report) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : report.nodes) {
    nodes.push_back({{"start", n.start},
                     {"end", n.end},
                     {"depth", n.depth},
                     {"stat", n.statistic},
                     {"k_star", n.k_star},
                     {"p", n.p_value},
                     {"accepted", n.accepted}});
  }
  return {{"change_points", report.change_points}, {"nodes", nodes}};
}

}  // namespace hankelcp

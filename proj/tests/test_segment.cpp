#include "doctest.h"

#include <algorithm>

#include "hankelcp/distributions.hpp"
#include "hankelcp/error.hpp"
#include "hankelcp/segment.hpp"

using namespace hankelcp;

namespace {

std::vector<SpdMatrix> regimes(const std::vector<std::pair<DistributionSpec, int>>& parts, std::uint64_t seed) {
  auto rng = make_stream(seed, {});
  std::vector<SpdMatrix> out;
  for (const auto& [spec, count] : parts)
    for (int i = 0; i < count; ++i) out.push_back(sample(spec, rng));
  return out;
}

const Eigen::MatrixXd kId2 = Eigen::MatrixXd::Identity(2, 2);

}  // namespace

TEST_CASE("short series give an empty report") {
  const auto xs = regimes({{cov_uniform_spec(2), 9}}, 1);
  const auto g = gram(xs);
  SegmentationConfig cfg;
  const auto r = binary_segmentation(g, cfg);
  CHECK(r.change_points.empty());
  CHECK(r.nodes.empty());
}

TEST_CASE("window below four is floored") {
  const auto g = gram(regimes({{cov_uniform_spec(2), 3}}, 2));
  SegmentationConfig cfg;
  cfg.window = 2;
  CHECK(binary_segmentation(g, cfg).nodes.empty());
}

TEST_CASE("single change is found in both split modes") {
  const auto xs = regimes({{cov_uniform_spec(2), 30}, {wishart_spec(2, 2.5, kId2), 30}}, 3);
  const auto g = gram(xs);
  for (auto mode : {SplitMode::paper_mid, SplitMode::at_changepoint}) {
    SegmentationConfig cfg;
    cfg.nb = 200;
    cfg.seed = 5;
    cfg.split_mode = mode;
    const auto before = kernel_evaluation_count();
    const auto r = binary_segmentation(g, cfg);
    CHECK(kernel_evaluation_count() == before);
    REQUIRE(r.change_points.size() >= 1);
    CHECK(std::count_if(r.change_points.begin(), r.change_points.end(),
                        [](int c) { return c >= 27 && c <= 33; }) == 1);
    CHECK(r.nodes.front().start == 0);
    CHECK(r.nodes.front().end == 60);
    CHECK(r.nodes.front().accepted);
  }
}

TEST_CASE("report invariants") {
  const auto xs = regimes({{cov_uniform_spec(2), 25},
                           {wishart_spec(2, 2.5, kId2), 25},
                           {wishart_spec(2, 2.5, 0.1 * kId2), 25}},
                          4);
  const auto g = gram(xs);
  SegmentationConfig cfg;
  cfg.nb = 200;
  cfg.split_mode = SplitMode::at_changepoint;
  const auto r = binary_segmentation(g, cfg);
  CHECK(std::is_sorted(r.change_points.begin(), r.change_points.end()));
  CHECK(std::adjacent_find(r.change_points.begin(), r.change_points.end()) == r.change_points.end());
  for (const auto& node : r.nodes) {
    CHECK(node.end - node.start >= std::max(cfg.window, 4));
    CHECK(node.k_star > node.start);
    CHECK(node.k_star < node.end);
    CHECK(node.accepted == (node.p_value <= cfg.alpha));
  }
  for (int cp : r.change_points) {
    const bool backed = std::any_of(r.nodes.begin(), r.nodes.end(),
                                    [&](const SegmentNode& n) { return n.accepted && n.k_star == cp; });
    CHECK(backed);
  }
  CHECK(r.change_points.size() >= 2);
}

TEST_CASE("report is deterministic for a fixed seed") {
  const auto xs = regimes({{cov_uniform_spec(2), 20}, {wishart_spec(2, 2.5, kId2), 20}}, 6);
  const auto g = gram(xs);
  SegmentationConfig cfg;
  cfg.nb = 100;
  cfg.seed = 77;
  CHECK(to_json(binary_segmentation(g, cfg)) == to_json(binary_segmentation(g, cfg)));
}

TEST_CASE("configuration validation and names") {
  SegmentationConfig cfg;
  cfg.window = 1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  CHECK(parse_split_mode("at_changepoint") == SplitMode::at_changepoint);
  CHECK(to_string(SplitMode::paper_mid) == "paper_mid");
  CHECK_THROWS_AS(parse_split_mode("middle"), InputError);
}

TEST_CASE("report JSON layout") {
  ChangePointReport r;
  r.change_points = {12};
  r.nodes.push_back({0, 30, 0, 1.5, 12, 0.01, true});
  const auto j = to_json(r);
  CHECK(j["change_points"][0] == 12);
  const auto& node = j["nodes"][0];
  for (const char* key : {"start", "end", "stat", "k_star", "p", "accepted"}) CHECK(node.contains(key));
}

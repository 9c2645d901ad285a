#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "hankelcp/distributions.hpp"
#include "hankelcp/error.hpp"
#include "hankelcp/parallel.hpp"
#include "hankelcp/resample.hpp"
#include "oracles.hpp"

using namespace hankelcp;

namespace {

KernelGram make_gram(Eigen::MatrixXd h) {
  const auto n = static_cast<std::size_t>(h.rows());
  return KernelGram(std::move(h), std::vector<std::uint8_t>(n * n, 0), {}, 0);
}

bool is_permutation_of_range(const std::vector<int>& p) {
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) return false;
  return true;
}

// Gram of two clearly separated blocks of k and n - k matrices.
KernelGram two_block_gram(int n, int k, std::uint64_t seed) {
  auto rng = make_stream(seed, {});
  const auto left = cov_uniform_spec(2);
  const auto right = wishart_spec(2, 2.5, Eigen::MatrixXd::Identity(2, 2));
  std::vector<SpdMatrix> xs;
  for (int i = 0; i < n; ++i) xs.push_back(sample(i < k ? left : right, rng));
  return gram(xs);
}

}  // namespace

TEST_CASE("permutations are distinct and valid") {
  const auto set = sample_permutations(12, 300, 99);
  CHECK_FALSE(set.with_replacement);
  CHECK(set.permutations.size() == 300);
  std::set<std::vector<int>> seen(set.permutations.begin(), set.permutations.end());
  CHECK(seen.size() == 300);
  for (const auto& p : set.permutations) CHECK(is_permutation_of_range(p));
}

TEST_CASE("small groups are enumerated without replacement") {
  const auto set = sample_permutations(3, 6, 1);
  CHECK_FALSE(set.with_replacement);
  std::set<std::vector<int>> seen(set.permutations.begin(), set.permutations.end());
  CHECK(seen.size() == 6);
  const auto few = sample_permutations(4, 10, 1);
  CHECK(std::set<std::vector<int>>(few.permutations.begin(), few.permutations.end()).size() == 10);
}

TEST_CASE("more permutations than the group has") {
  const auto set = sample_permutations(3, 20, 1);
  CHECK(set.with_replacement);
  CHECK(set.permutations.size() == 20);
}

TEST_CASE("permutation streams are seeded per index") {
  const auto a = sample_permutations(15, 50, 7);
  const auto b = sample_permutations(15, 80, 7);
  const auto c = sample_permutations(15, 50, 8);
  CHECK(std::equal(a.permutations.begin(), a.permutations.end(), b.permutations.begin()));
  CHECK(a.permutations != c.permutations);
}

TEST_CASE("p-value conventions") {
  const std::vector<double> null{1.0, 2.0, 3.0, 4.0};
  CHECK(permutation_p_value(3.0, null, PValueMode::add_one) == doctest::Approx(3.0 / 5.0));
  CHECK(permutation_p_value(3.0, null, PValueMode::paper_strict) == doctest::Approx(0.25));
  CHECK(permutation_p_value(10.0, null, PValueMode::add_one) == doctest::Approx(0.2));
  CHECK(permutation_p_value(10.0, null, PValueMode::paper_strict) == 0.0);
  CHECK(parse_pvalue_mode("paper_strict") == PValueMode::paper_strict);
  CHECK_THROWS_AS(parse_pvalue_mode("exact"), InputError);
}

TEST_CASE("critical value is an order statistic") {
  std::vector<double> v(500);
  std::iota(v.begin(), v.end(), 1.0);
  std::shuffle(v.begin(), v.end(), std::mt19937_64(3));
  CHECK(empirical_critical_value(v, 0.05) == 475.0);
  CHECK(empirical_critical_value(v, 0.10) == 450.0);
  CHECK(empirical_critical_value({5.0}, 0.05) == 5.0);
}

TEST_CASE("constant Gram gives the extreme p-values") {
  const auto g = make_gram(Eigen::MatrixXd::Constant(8, 8, 0.4));
  ResampleConfig rs;
  rs.nb = 100;
  const auto add_one = permutation_pvalue(g, {0.5}, rs);
  CHECK(add_one.p_value == 1.0);
  rs.pvalue_mode = PValueMode::paper_strict;
  CHECK(permutation_pvalue(g, {0.5}, rs).p_value == 0.0);
}

TEST_CASE("planted change is detected without kernel evaluations") {
  const auto g = two_block_gram(30, 15, 5);
  ResampleConfig rs;
  rs.nb = 200;
  rs.seed = 4;
  const auto before = kernel_evaluation_count();
  const auto r = permutation_pvalue(g, {0.5}, rs);
  CHECK(kernel_evaluation_count() == before);
  CHECK(r.p_value <= 0.05);
  CHECK(r.k_hat >= 13);
  CHECK(r.k_hat <= 17);
  CHECK(r.null_stats.size() == 200);
  CHECK(r.n == 30);
}

TEST_CASE("p-value is independent of the thread count") {
  const auto g = two_block_gram(20, 10, 6);
  ResampleConfig rs;
  rs.nb = 150;
  rs.seed = 12;
  set_thread_count(1);
  const auto a = permutation_pvalue(g, {0.5}, rs);
  set_thread_count(4);
  const auto b = permutation_pvalue(g, {0.5}, rs);
  set_thread_count(0);
  CHECK(a.p_value == b.p_value);
  CHECK(a.null_stats == b.null_stats);
}

TEST_CASE("sub-block test uses only the block") {
  std::mt19937_64 rng(1);
  const auto h = oracle::random_gram(12, 3, rng);
  const auto full = make_gram(h);
  const auto block = make_gram(h.block(3, 3, 7, 7));
  ResampleConfig rs;
  rs.nb = 60;
  const auto a = permutation_pvalue(full, 3, 10, {0.5}, rs);
  const auto b = permutation_pvalue(block, {0.5}, rs);
  CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-14));
  CHECK(a.k_hat == b.k_hat);
  CHECK(a.p_value == b.p_value);
  CHECK_THROWS_AS(permutation_pvalue(full, 3, 6, {0.5}, rs), InputError);
}

TEST_CASE("warp-speed power separates distinct families") {
  const auto u = cov_uniform_spec(2);
  const auto w = wishart_spec(2, 2.5, Eigen::MatrixXd::Identity(2, 2));
  ResampleConfig rs;
  rs.seed = 3;
  const auto r = warp_speed_power(u, w, 20, 10, {0.5}, {}, rs, 60);
  CHECK(r.statistics.size() == 60);
  CHECK(r.rejection_rate >= 0.9);
  const auto again = warp_speed_power(u, w, 20, 10, {0.5}, {}, rs, 60);
  CHECK(again.statistics == r.statistics);
  CHECK_THROWS_AS(warp_speed_power(u, w, 20, 0, {0.5}, {}, rs, 10), InputError);
}

TEST_CASE("result JSON") {
  const auto g = make_gram(Eigen::MatrixXd::Identity(5, 5));
  ResampleConfig rs;
  rs.nb = 10;
  const auto r = permutation_pvalue(g, {0.5}, rs);
  CHECK_FALSE(to_json(r, false).contains("null_stats"));
  CHECK(to_json(r, true)["null_stats"].size() == 10);
  CHECK(to_json(r, false)["pvalue_mode"] == "add_one");
}

#include "doctest.h"

#include <numeric>
#include <random>

#include "hankelcp/cpstat.hpp"
#include "hankelcp/error.hpp"
#include "oracles.hpp"

using namespace hankelcp;

namespace {

KernelGram make_gram(Eigen::MatrixXd h) {
  const auto n = static_cast<std::size_t>(h.rows());
  return KernelGram(std::move(h), std::vector<std::uint8_t>(n * n, 0), {}, 0);
}

}  // namespace

TEST_CASE("prefix-sum profile equals the triple loop") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 11;
    const auto h = oracle::random_gram(n, 3, rng);
    for (double gamma : {0.5, 1.0}) {
      const auto p = statistic_profile(make_gram(h), {gamma});
      const auto naive = oracle::weighted_profile(h, gamma);
      REQUIRE(p.weighted.size() == naive.size());
      for (std::size_t k = 0; k < naive.size(); ++k) {
        CHECK(std::abs(p.weighted[k] - naive[k]) <= 1e-12);
        CHECK(std::abs(p.bracket[k] - oracle::bracket(h, static_cast<int>(k) + 1)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("maximum and argmax") {
  std::mt19937_64 rng(8);
  const auto h = oracle::random_gram(9, 2, rng);
  const auto p = statistic_profile(make_gram(h), {0.5});
  const auto best = statistic_max(p);
  CHECK(best.value == p.max_value);
  CHECK(best.k_hat == p.argmax_k);
  for (double w : p.weighted) CHECK(w <= p.max_value);
  std::vector<int> order(9);
  std::iota(order.begin(), order.end(), 0);
  const auto fast = statistic_value(h, order, {0.5});
  CHECK(fast.value == p.max_value);
  CHECK(fast.k_hat == p.argmax_k);
}

TEST_CASE("ties resolve to the smallest split") {
  const auto p = statistic_profile(make_gram(Eigen::MatrixXd::Constant(6, 6, 0.5)), {0.5});
  CHECK(p.argmax_k == 1);
  for (double b : p.bracket) CHECK(std::abs(b) < 1e-15);
}

TEST_CASE("relabeled profile reads the permuted Gram") {
  std::mt19937_64 rng(4);
  const auto h = oracle::random_gram(7, 3, rng);
  const std::vector<int> order{3, 0, 6, 1, 5, 2, 4};
  Eigen::MatrixXd permuted(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) permuted(i, j) = h(order[i], order[j]);
  const auto a = statistic_profile(h, order, {1.0});
  const auto b = oracle::weighted_profile(permuted, 1.0);
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(a.weighted[k] == doctest::Approx(b[k]).epsilon(1e-13));
}

TEST_CASE("sub-block profile") {
  std::mt19937_64 rng(5);
  const auto h = oracle::random_gram(10, 3, rng);
  const std::vector<int> order{4, 5, 6, 7, 8};
  const auto p = statistic_profile(h, order, {0.5});
  const auto naive = oracle::weighted_profile(h.block(4, 4, 5, 5), 0.5);
  for (std::size_t k = 0; k < naive.size(); ++k) CHECK(p.weighted[k] == doctest::Approx(naive[k]).epsilon(1e-13));
}

TEST_CASE("split weight") {
  CHECK(split_weight(10, 5, 1.0) == doctest::Approx(0.25));
  CHECK(split_weight(10, 5, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(StatConfig{0.0}.validate(), InputError);
  CHECK_THROWS_AS(StatConfig{1.5}.validate(), InputError);
  CHECK_NOTHROW(StatConfig{1.0}.validate());
  CHECK_THROWS_AS(statistic_profile(make_gram(Eigen::MatrixXd::Ones(1, 1)), {0.5}), InputError);
  const auto g = make_gram(Eigen::MatrixXd::Identity(4, 4));
  CHECK_THROWS_AS(two_sample_bracket(g, 0), InputError);
  CHECK_THROWS_AS(two_sample_bracket(g, 4), InputError);
  const std::vector<int> bad{0, 9};
  CHECK_THROWS_AS(statistic_value(g.values(), bad, {0.5}), InputError);
}

TEST_CASE("profile JSON layout") {
  const auto p = statistic_profile(make_gram(Eigen::MatrixXd::Identity(4, 4)), {0.5});
  const auto j = to_json(p);
  CHECK(j["n"] == 4);
  CHECK(j["k"].size() == 3);
  CHECK(j["weighted"].size() == 3);
  CHECK(j.contains("k_hat"));
  CHECK(j.contains("max"));
}

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <functional>

#include "hankelcp/error.hpp"
#include "hankelcp/pipeline.hpp"

using namespace hankelcp;

namespace {

const std::filesystem::path kData = HANKELCP_TEST_DATA;

PriceSeries hourly(const std::string& symbol, const std::vector<double>& close, std::int64_t t0 = 1704067200) {
  PriceSeries p;
  p.symbol = symbol;
  for (std::size_t i = 0; i < close.size(); ++i) {
    p.times.push_back(t0 + 3600 * static_cast<std::int64_t>(i));
    p.close.push_back(close[i]);
  }
  return p;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("CSV columns are found by name") {
  const auto a = load_prices(kData / "prices_3row.csv");
  const auto b = load_prices(kData / "prices_3row_reordered.csv", "prices_3row");
  CHECK(a.symbol == "prices_3row");
  CHECK(a.times.size() == 3);
  CHECK(a.times == b.times);
  CHECK(a.close == b.close);
  CHECK(a.close[1] == 101.5);
}

TEST_CASE("duplicate timestamps are rejected with the row") {
  const auto msg = error_of([] { load_prices(kData / "prices_duplicate.csv"); });
  CHECK(msg.find("row 4") != std::string::npos);
  CHECK(msg.find("duplicates") != std::string::npos);
  const auto back = error_of([] { parse_prices("timestamp,close\n20,1\n10,1\n", "x"); });
  CHECK(back.find("row 3") != std::string::npos);
}

TEST_CASE("CSV edge cases") {
  const auto p = parse_prices("\xEF\xBB\xBFTimeStamp,Open,CLOSE\r\n10,1,2\r\n\r\n20,1,0\r\n30,1,3\r\n", "x");
  CHECK(p.times == std::vector<std::int64_t>{10, 30});
  CHECK(p.rejected_rows == std::vector<int>{4});
  CHECK_THROWS_AS(parse_prices("time,close\n1,2\n", "x"), InputError);
  CHECK(error_of([] { parse_prices("timestamp,close\n1,abc\n", "x"); }).find("row 2") != std::string::npos);
  CHECK_THROWS_AS(load_prices(kData / "missing.csv"), InputError);
}

TEST_CASE("timestamps") {
  CHECK(parse_timestamp("1704067200") == 1704067200);
  CHECK(parse_timestamp("2024-01-01T00:00:00Z") == 1704067200);
  CHECK(parse_timestamp("2024-01-01 00:00") == 1704067200);
  CHECK(parse_timestamp("2024-01-01") == 1704067200);
  CHECK(parse_timestamp("2024-01-01T02:30:00+02:30") == 1704067200);
  CHECK(parse_timestamp("2024-01-01T00:00:00.750Z") == 1704067200);
  CHECK(parse_timestamp("2024-02-29T12:00:00Z") == 1709208000);
  CHECK(format_timestamp(1709208000) == "2024-02-29T12:00:00Z");
  CHECK_THROWS_AS(parse_timestamp("2023-02-29"), InputError);
  CHECK_THROWS_AS(parse_timestamp("2024-01-01T25:00"), InputError);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), InputError);
}

TEST_CASE("log-returns") {
  const auto flat = log_returns({hourly("a", {100.0, 100.0})});
  CHECK(flat.values.rows() == 1);
  CHECK(flat.values(0, 0) == 0.0);
  const auto up = log_returns({hourly("a", {100.0, 100.0 * std::exp(1.0)})});
  CHECK(up.values(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(up.times.front() == 1704067200 + 3600);
}

TEST_CASE("returns use the timestamps every series shares") {
  auto a = hourly("a", {1, 2, 3, 4, 5});
  auto b = hourly("b", {1, 2, 3, 4, 5});
  b.times.erase(b.times.begin() + 2);
  b.close.erase(b.close.begin() + 2);
  const auto panel = log_returns({a, b});
  CHECK(panel.dropped_timestamps == 1);
  REQUIRE(panel.values.rows() == 3);
  CHECK(panel.values(1, 0) == doctest::Approx(std::log(4.0 / 2.0)));
  CHECK(panel.symbols == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(log_returns({hourly("a", {1.0})}), InputError);
}

TEST_CASE("grouping names") {
  CHECK(Grouping::parse("day").kind == Grouping::Kind::calendar_day);
  CHECK(Grouping::parse("hour").kind == Grouping::Kind::calendar_hour);
  const auto c = Grouping::parse("count:5");
  CHECK(c.kind == Grouping::Kind::fixed_count);
  CHECK(c.count == 5);
  CHECK(c.to_string() == "count:5");
  CHECK_THROWS_AS(Grouping::parse("count:1"), InputError);
  CHECK_THROWS_AS(Grouping::parse("week"), InputError);
}

TEST_CASE("two days of hourly prices give two daily matrices") {
  const auto panel = log_returns({load_prices(kData / "hourly_a.csv"), load_prices(kData / "hourly_b.csv")});
  const auto cov = windowed_covariance(panel, Grouping::parse("day"));
  REQUIRE(cov.series.items.size() == 2);
  CHECK(cov.series.dim == 2);
  CHECK(cov.series.items[0].label == "2024-03-01");
  CHECK(cov.series.items[1].label == "2024-03-02");
  CHECK(cov.zero_items.empty());
  // Trace equals the sum of per-asset sample variances.
  for (const auto& item : cov.series.items) {
    double total = 0.0;
    for (int s = 0; s < 2; ++s) {
      std::vector<double> xs;
      for (std::size_t r = 0; r < panel.times.size(); ++r)
        if (panel.times[r] >= item.start && panel.times[r] <= item.end) xs.push_back(panel.values(r, s));
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      total += ss / static_cast<double>(xs.size() - 1);
    }
    CHECK(std::abs(item.matrix.trace() - total) <= 1e-12);
  }
}

TEST_CASE("fixed-count blocks drop the remainder") {
  std::vector<double> close;
  for (int i = 0; i < 12; ++i) close.push_back(100.0 + i * (i % 3));
  const auto panel = log_returns({hourly("a", close)});  // 11 returns
  const auto cov = windowed_covariance(panel, Grouping::parse("count:5"));
  CHECK(cov.series.items.size() == 2);
  CHECK(cov.series.items[1].label == "block 1");
  CHECK(cov.dropped_groups.size() == 1);
}

TEST_CASE("single-row groups are dropped and flat groups flagged") {
  PriceSeries p;
  p.symbol = "a";
  const std::int64_t t0 = 1704067200;
  for (int i = 0; i < 7; ++i) {
    p.times.push_back(t0 + 1800 * i);
    p.close.push_back(i < 5 ? 10.0 : 10.0 + i);
  }
  // Half-hourly returns: hours 00 and 03 hold one each, hours 01 and 02 two each.
  const auto cov = windowed_covariance(log_returns({p}), Grouping::parse("hour"));
  CHECK(cov.dropped_groups.size() == 2);
  REQUIRE(cov.series.items.size() == 2);
  CHECK(cov.series.items[0].label == "2024-01-01T01:00Z");
  CHECK(cov.zero_items == std::vector<std::size_t>{0});
}

TEST_CASE("principal-component reduction") {
  MatrixSeries s;
  s.dim = 3;
  s.items.push_back({"x", 0, 0, SpdMatrix(Eigen::Vector3d(3.0, 1.0, 2.0).asDiagonal().toDenseMatrix())});
  s.items.push_back({"y", 1, 1, SpdMatrix(Eigen::Vector3d(1.0, 1.0, 4.0).asDiagonal().toDenseMatrix())});
  const auto r = pca_reduce(s, 2);
  CHECK(r.dim == 2);
  CHECK(r.items[0].matrix.entries()(0, 0) == doctest::Approx(3.0));
  CHECK(r.items[0].matrix.entries()(1, 1) == doctest::Approx(2.0));
  CHECK(r.items[1].matrix.entries()(0, 0) == doctest::Approx(4.0));
  CHECK(r.items[0].label == "x");
  const auto ev = explained_variance(s);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(3.0 / 6.0));
  CHECK(ev[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(pca_reduce(s, 4), InputError);
  CHECK_THROWS_AS(pca_reduce(s, 0), InputError);
}

TEST_CASE("matrix series JSON round trip is exact") {
  MatrixSeries s;
  s.dim = 2;
  s.items.push_back({"a", 1, 2, SpdMatrix(Eigen::Matrix2d{{0.1 + 0.2, 1e-17}, {1e-17, 2.0 / 3.0}})});
  s.items.push_back({"b", 3, 4, SpdMatrix(Eigen::Matrix2d{{1.0, 0.0}, {0.0, 0.0}})});
  const auto path = std::filesystem::temp_directory_path() / "hankelcp_series_roundtrip.json";
  save_matrix_series(s, path);
  const auto back = load_matrix_series(path);
  std::filesystem::remove(path);
  REQUIRE(back.items.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.items[i].label == s.items[i].label);
    CHECK(back.items[i].start == s.items[i].start);
    CHECK(back.items[i].matrix.entries() == s.items[i].matrix.entries());
  }
}

TEST_CASE("matrix series schema errors name the offending item") {
  const auto bad = nlohmann::json::parse(R"({"dim":2,"items":[{"data":[[1,0],[0,1]]},{"data":[[1,0,0],[0,1,0],[0,0,1]]}]})");
  CHECK(error_of([&] { matrix_series_from_json(bad); }).find("/items/1/data") != std::string::npos);
  const auto nan = nlohmann::json::parse(R"({"dim":1,"items":[{"data":[["x"]]}]})");
  CHECK(error_of([&] { matrix_series_from_json(nan); }).find("/items/0/data/0/0") != std::string::npos);
  CHECK_THROWS_AS(matrix_series_from_json(nlohmann::json::parse(R"({"items":[]})")), InputError);
  const auto empty = matrix_series_from_json(nlohmann::json::parse(R"({"dim":3,"items":[]})"));
  CHECK(empty.items.empty());
  CHECK(empty.dim == 3);
}

#pragma once

// Price files -> log-returns -> windowed covariance matrices, plus the
// MatrixSeries JSON format every other command reads.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hankelcp/spd_matrix.hpp"

namespace hankelcp {

struct PriceSeries {
  std::string symbol;
  std::vector<std::int64_t> times;  // UTC epoch seconds, strictly increasing
  std::vector<double> close;        // > 0
  std::vector<int> rejected_rows;   // file line numbers dropped for a non-positive close
};

/// Reads a CSV with a header row. Columns are located by name, case-insensitively;
/// `timestamp` (epoch seconds or ISO-8601 UTC) and `close` are required, any
/// other column is ignored. The symbol defaults to the file stem.
PriceSeries load_prices(const std::filesystem::path& path, std::string symbol = {});
PriceSeries parse_prices(const std::string& text, std::string symbol,
                         const std::string& source = "input");

/// Epoch seconds from "YYYY-MM-DD[(T| )HH:MM[:SS[.fff]]][Z|±HH:MM]" or a plain integer.
std::int64_t parse_timestamp(std::string_view text);
/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(std::int64_t epoch);

struct ReturnPanel {
  std::vector<std::string> symbols;
  std::vector<std::int64_t> times;  // timestamp t of log(X_t / X_{t-1})
  Eigen::MatrixXd values;           // times.size() x symbols.size()
  std::size_t dropped_timestamps = 0;  // present in some series but not all
};

/// Log-returns between consecutive timestamps common to every series.
ReturnPanel log_returns(const std::vector<PriceSeries>& prices);

struct Grouping {
  enum class Kind { calendar_day, calendar_hour, fixed_count };
  Kind kind = Kind::calendar_day;
  int count = 0;  // fixed_count only

  /// "day", "hour" or "count:N".
  static Grouping parse(const std::string& text);
  std::string to_string() const;
};

struct MatrixItem {
  std::string label;
  std::int64_t start = 0;
  std::int64_t end = 0;
  SpdMatrix matrix;
};

struct MatrixSeries {
  int dim = 0;
  std::vector<MatrixItem> items;

  std::vector<SpdMatrix> matrices() const;
};

struct CovarianceSeries {
  MatrixSeries series;
  std::vector<std::string> dropped_groups;  // with the reason
  std::vector<std::size_t> zero_items;      // indices of all-zero covariance matrices
};

/// Unbiased sample covariance of each group of returns; returns are grouped
/// by their own timestamp t. Groups with fewer than 2 rows are dropped.
CovarianceSeries windowed_covariance(const ReturnPanel& panel, const Grouping& grouping);

/// Replaces every matrix with diag of its p largest eigenvalues.
MatrixSeries pca_reduce(const MatrixSeries& series, int p);
/// Cumulative eigenvalue share of the mean matrix, entry i covering the i+1 largest.
std::vector<double> explained_variance(const MatrixSeries& series);

nlohmann::json to_json(const MatrixSeries& series);
/// Schema errors name the JSON pointer of the offending value.
MatrixSeries matrix_series_from_json(const nlohmann::json& j);

void save_matrix_series(const MatrixSeries& series, const std::filesystem::path& path);
MatrixSeries load_matrix_series(const std::filesystem::path& path);

}  // namespace hankelcp

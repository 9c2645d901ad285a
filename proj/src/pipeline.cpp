#include "hankelcp/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>

#include "hankelcp/error.hpp"

namespace hankelcp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Reads exactly `width` digits at s[pos].
bool read_digits(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return parse_number(s.substr(pos, width), out);
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  text = trim(text);
  std::int64_t epoch = 0;
  if (parse_number(text, epoch)) return epoch;

  auto bad = [&]() { return InputError("unparsable timestamp '" + std::string(text) + "'"); };
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!read_digits(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !read_digits(text, 5, 2, mo) || text[7] != '-' || !read_digits(text, 8, 2, d))
    throw bad();
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw bad();

  std::size_t pos = 10;
  long offset = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ') throw bad();
    if (!read_digits(text, pos + 1, 2, h) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !read_digits(text, pos + 4, 2, mi))
      throw bad();
    pos += 6;
    if (pos < text.size() && text[pos] == ':') {
      if (!read_digits(text, pos + 1, 2, sec)) throw bad();
      pos += 3;
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      }
    }
    if (h > 23 || mi > 59 || sec > 60) throw bad();
    if (pos < text.size()) {
      const char c = text[pos];
      if ((c == 'Z' || c == 'z') && pos + 1 == text.size()) {
        pos = text.size();
      } else if ((c == '+' || c == '-') && text.size() == pos + 6 && text[pos + 3] == ':') {
        int oh = 0, om = 0;
        if (!read_digits(text, pos + 1, 2, oh) || !read_digits(text, pos + 4, 2, om)) throw bad();
        offset = (c == '+' ? 1 : -1) * (oh * 3600L + om * 60L);
        pos = text.size();
      } else {
        throw bad();
      }
    }
  }
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + sec - offset;
}

std::string format_timestamp(std::int64_t epoch) {
  const auto days = epoch >= 0 ? epoch / 86400 : (epoch - 86399) / 86400;
  const auto secs = epoch - days * 86400;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

PriceSeries parse_prices(const std::string& text, std::string symbol, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int ts_col = -1, close_col = -1;
  std::size_t columns = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    columns = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      auto name = lower(fields[i]);
      if (line_no == 1 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);
      if (name == "timestamp") ts_col = static_cast<int>(i);
      if (name == "close") close_col = static_cast<int>(i);
    }
    break;
  }
  if (ts_col < 0 || close_col < 0)
    throw InputError(source + ": header must contain 'timestamp' and 'close' columns");

  PriceSeries out;
  out.symbol = std::move(symbol);
  std::optional<std::int64_t> previous;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    const auto where = source + " row " + std::to_string(line_no);
    if (fields.size() != columns)
      throw InputError(where + ": expected " + std::to_string(columns) + " fields, found " +
                       std::to_string(fields.size()));
    std::int64_t t = 0;
    try {
      t = parse_timestamp(fields[static_cast<std::size_t>(ts_col)]);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    double close = 0.0;
    if (!parse_number(fields[static_cast<std::size_t>(close_col)], close) || !std::isfinite(close))
      throw InputError(where + ": unparsable close '" +
                       std::string(fields[static_cast<std::size_t>(close_col)]) + "'");
    if (previous && t <= *previous)
      throw InputError(where + ": timestamp " + format_timestamp(t) +
                       (t == *previous ? " duplicates" : " precedes") + " the previous row");
    previous = t;
    if (!(close > 0.0)) {
      out.rejected_rows.push_back(line_no);
      continue;
    }
    out.times.push_back(t);
    out.close.push_back(close);
  }
  return out;
}

PriceSeries load_prices(const std::filesystem::path& path, std::string symbol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (symbol.empty()) symbol = path.stem().string();
  return parse_prices(buf.str(), std::move(symbol), path.string());
}

ReturnPanel log_returns(const std::vector<PriceSeries>& prices) {
  if (prices.empty()) throw InputError("log_returns: no price series");
  std::vector<std::int64_t> common = prices.front().times;
  std::set<std::int64_t> all(common.begin(), common.end());
  for (std::size_t s = 1; s < prices.size(); ++s) {
    std::vector<std::int64_t> next;
    std::set_intersection(common.begin(), common.end(), prices[s].times.begin(),
                          prices[s].times.end(), std::back_inserter(next));
    common = std::move(next);
    all.insert(prices[s].times.begin(), prices[s].times.end());
  }
  if (common.size() < 2)
    throw InputError("log_returns: fewer than 2 timestamps shared by all series");

  ReturnPanel panel;
  panel.dropped_timestamps = all.size() - common.size();
  const auto rows = static_cast<Eigen::Index>(common.size() - 1);
  panel.values.resize(rows, static_cast<Eigen::Index>(prices.size()));
  panel.times.assign(common.begin() + 1, common.end());
  for (std::size_t s = 0; s < prices.size(); ++s) {
    panel.symbols.push_back(prices[s].symbol);
    const auto& times = prices[s].times;
    std::size_t pos = 0;
    double prev = 0.0;
    for (std::size_t r = 0; r < common.size(); ++r) {
      while (times[pos] != common[r]) ++pos;
      const double x = prices[s].close[pos];
      if (r > 0) panel.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(s)) = std::log(x / prev);
      prev = x;
    }
  }
  return panel;
}

Grouping Grouping::parse(const std::string& text) {
  if (text == "day") return {Kind::calendar_day, 0};
  if (text == "hour") return {Kind::calendar_hour, 0};
  if (text.rfind("count:", 0) == 0) {
    int n = 0;
    if (parse_number(std::string_view(text).substr(6), n) && n >= 2) return {Kind::fixed_count, n};
  }
  throw InputError("grouping must be day, hour or count:N with N >= 2, got '" + text + "'");
}

std::string Grouping::to_string() const {
  switch (kind) {
    case Kind::calendar_day: return "day";
    case Kind::calendar_hour: return "hour";
    case Kind::fixed_count: return "count:" + std::to_string(count);
  }
  return "unknown";
}

std::vector<SpdMatrix> MatrixSeries::matrices() const {
  std::vector<SpdMatrix> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.matrix);
  return out;
}

CovarianceSeries windowed_covariance(const ReturnPanel& panel, const Grouping& grouping) {
  const auto n = static_cast<std::size_t>(panel.values.rows());
  const auto d = panel.values.cols();
  if (n == 0 || d == 0) throw InputError("windowed_covariance: empty return panel");
  if (grouping.kind == Grouping::Kind::fixed_count && grouping.count < 2)
    throw InputError("windowed_covariance: count grouping needs at least 2 rows per group");

  // Consecutive row ranges sharing a key.
  struct Group {
    std::size_t begin, end;
    std::string label;
  };
  std::vector<Group> groups;
  auto key_of = [&](std::size_t r) -> std::int64_t {
    const auto t = panel.times[r];
    switch (grouping.kind) {
      case Grouping::Kind::calendar_day: return t >= 0 ? t / 86400 : (t - 86399) / 86400;
      case Grouping::Kind::calendar_hour: return t >= 0 ? t / 3600 : (t - 3599) / 3600;
      case Grouping::Kind::fixed_count: return static_cast<std::int64_t>(r) / grouping.count;
    }
    return 0;
  };
  for (std::size_t r = 0; r < n;) {
    const auto key = key_of(r);
    std::size_t e = r + 1;
    while (e < n && key_of(e) == key) ++e;
    std::string label;
    const auto stamp = format_timestamp(panel.times[r]);
    switch (grouping.kind) {
      case Grouping::Kind::calendar_day: label = stamp.substr(0, 10); break;
      case Grouping::Kind::calendar_hour: label = stamp.substr(0, 13) + ":00Z"; break;
      case Grouping::Kind::fixed_count: label = "block " + std::to_string(key); break;
    }
    groups.push_back({r, e, std::move(label)});
    r = e;
  }

  CovarianceSeries out;
  out.series.dim = static_cast<int>(d);
  for (const auto& g : groups) {
    const auto size = g.end - g.begin;
    if (size < 2 || (grouping.kind == Grouping::Kind::fixed_count &&
                     size < static_cast<std::size_t>(grouping.count))) {
      out.dropped_groups.push_back(g.label + " (" + std::to_string(size) + " rows)");
      continue;
    }
    const Eigen::MatrixXd block =
        panel.values.middleRows(static_cast<Eigen::Index>(g.begin), static_cast<Eigen::Index>(size));
    const Eigen::RowVectorXd mean = block.colwise().mean();
    const Eigen::MatrixXd centered = block.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(size - 1);
    if (cov.isZero(0.0)) out.zero_items.push_back(out.series.items.size());
    out.series.items.push_back(
        {g.label, panel.times[g.begin], panel.times[g.end - 1], SpdMatrix(cov)});
  }
  if (out.series.items.empty()) throw InputError("windowed_covariance: no group has 2 or more rows");
  return out;
}

MatrixSeries pca_reduce(const MatrixSeries& series, int p) {
  if (p < 1 || p > series.dim)
    throw InputError("pca_reduce: target dimension must lie in [1, " + std::to_string(series.dim) + "]");
  MatrixSeries out;
  out.dim = p;
  for (const auto& item : series.items) {
    const auto& eigs = item.matrix.eigenvalues();
    const std::vector<double> top(eigs.begin(), eigs.begin() + p);
    out.items.push_back({item.label, item.start, item.end, SpdMatrix::diagonal(top)});
  }
  return out;
}

std::vector<double> explained_variance(const MatrixSeries& series) {
  if (series.items.empty()) return {};
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(series.dim, series.dim);
  for (const auto& item : series.items) mean += item.matrix.entries();
  mean /= static_cast<double>(series.items.size());
  const SpdMatrix m(mean);
  const double total = std::max(m.trace(), 0.0);
  std::vector<double> out;
  double acc = 0.0;
  for (double v : m.eigenvalues()) {
    acc += v;
    out.push_back(total > 0.0 ? acc / total : 0.0);
  }
  return out;
}

nlohmann::json to_json(const MatrixSeries& series) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : series.items) {
    const auto& e = item.matrix.entries();
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(e.cols()));
      for (Eigen::Index c = 0; c < e.cols(); ++c) row[static_cast<std::size_t>(c)] = e(r, c);
      rows.push_back(std::move(row));
    }
    items.push_back({{"label", item.label}, {"start", item.start}, {"end", item.end}, {"data", rows}});
  }
  return {{"dim", series.dim}, {"items", items}};
}

MatrixSeries matrix_series_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& pointer, const std::string& what) {
    return InputError(pointer + ": " + what);
  };
  if (!j.is_object()) throw fail("/", "expected an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw fail("/dim", "missing or not an integer");
  if (!j.contains("items") || !j["items"].is_array()) throw fail("/items", "missing or not an array");
  MatrixSeries out;
  out.dim = j["dim"].get<int>();
  if (out.dim < 1) throw fail("/dim", "must be positive");
  const auto d = static_cast<std::size_t>(out.dim);

  const auto& items = j["items"];
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto base = "/items/" + std::to_string(i);
    const auto& it = items[i];
    if (!it.is_object()) throw fail(base, "expected an object");
    MatrixItem item;
    if (it.contains("label")) {
      if (!it["label"].is_string()) throw fail(base + "/label", "not a string");
      item.label = it["label"].get<std::string>();
    }
    for (const char* key : {"start", "end"}) {
      if (!it.contains(key)) continue;
      if (!it[key].is_number_integer()) throw fail(base + "/" + key, "not an integer");
      (std::string(key) == "start" ? item.start : item.end) = it[key].get<std::int64_t>();
    }
    if (!it.contains("data") || !it["data"].is_array()) throw fail(base + "/data", "missing or not an array");
    const auto& data = it["data"];
    if (data.size() != d)
      throw fail(base + "/data", "expected " + std::to_string(d) + " rows, found " + std::to_string(data.size()));
    Eigen::MatrixXd m(out.dim, out.dim);
    for (std::size_t r = 0; r < d; ++r) {
      const auto& row = data[r];
      const auto rp = base + "/data/" + std::to_string(r);
      if (!row.is_array() || row.size() != d)
        throw fail(rp, "expected " + std::to_string(d) + " entries");
      for (std::size_t c = 0; c < d; ++c) {
        if (!row[c].is_number()) throw fail(rp + "/" + std::to_string(c), "not a number");
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
      }
    }
    try {
      item.matrix = SpdMatrix(std::move(m));
    } catch (const InputError& e) {
      throw fail(base + "/data", e.what());
    }
    out.items.push_back(std::move(item));
  }
  return out;
}

void save_matrix_series(const MatrixSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(series).dump(1) << '\n';
}

MatrixSeries load_matrix_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  try {
    return matrix_series_from_json(j);
  } catch (const InputError& e) {
    throw InputError(path.string() + " " + e.what());
  }
}

}  // namespace hankelcp

#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hankelcp/cpstat.hpp"
#include "hankelcp/distributions.hpp"
#include "hankelcp/error.hpp"
#include "hankelcp/kernel.hpp"
#include "hankelcp/parallel.hpp"
#include "hankelcp/pipeline.hpp"
#include "hankelcp/resample.hpp"
#include "hankelcp/segment.hpp"
#include "hankelcp/specfun.hpp"
#include "hankelcp/version.hpp"

namespace hankelcp::cli {

using json = nlohmann::json;

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 initialisation failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

namespace {

// Provenance block embedded in every result file.
class Manifest {
 public:
  explicit Manifest(std::string command)
      : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  void add_input(const std::string& path) {
    inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
  }

  json finish(json config, std::optional<std::uint64_t> seed) const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json j = {{"command", command_},
              {"version", kVersion},
              {"config", std::move(config)},
              {"inputs", inputs_}};
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["duration_seconds"] = seconds;
    return j;
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  json inputs_ = json::array();
};

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

json kernel_json(const KernelConfig& k) {
  return {{"nu", k.nu},
          {"scale", k.scale},
          {"max_degree", k.truncation.max_degree},
          {"rel_tol", k.truncation.rel_tol},
          {"quiet_layers", k.truncation.consecutive_quiet_layers}};
}

// Diagnostics shared by detect and segment.
void warn_about_gram(const KernelGram& g, const std::vector<SpdMatrix>& sample, std::ostream& err) {
  if (g.truncated_count() > 0)
    err << "warning: " << g.truncated_count() << " of " << g.n() * g.n()
        << " Gram entries reached max_degree=" << g.config().truncation.max_degree
        << " without converging\n";
  double mean_trace = 0.0;
  for (const auto& x : sample) mean_trace += x.trace();
  mean_trace *= g.config().scale / static_cast<double>(sample.size());
  if (mean_trace < 1e-4)
    err << "warning: mean trace " << mean_trace
        << " is tiny; the kernel is nearly constant at this scale (see --scale)\n";
}

std::string item_label(const MatrixSeries& s, int index) {
  const auto& item = s.items[static_cast<std::size_t>(index)];
  return item.label.empty() ? "#" + std::to_string(index) : item.label;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// ---------------------------------------------------------------- ingest

struct IngestOptions {
  std::vector<std::string> prices;
  std::string grouping = "day";
  std::string out;
  int pca = 0;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
  Manifest manifest("ingest");
  const auto grouping = Grouping::parse(o.grouping);
  std::vector<PriceSeries> prices;
  json rejected = json::object();
  for (const auto& path : o.prices) {
    manifest.add_input(path);
    prices.push_back(load_prices(path));
    const auto& p = prices.back();
    if (!p.rejected_rows.empty()) {
      rejected[p.symbol] = p.rejected_rows;
      for (int row : p.rejected_rows)
        err << "dropped " << path << " row " << row << ": non-positive close\n";
    }
  }
  const auto panel = log_returns(prices);
  if (panel.dropped_timestamps > 0)
    err << "dropped " << panel.dropped_timestamps << " timestamps not shared by all series\n";
  auto cov = windowed_covariance(panel, grouping);
  for (const auto& g : cov.dropped_groups) err << "dropped group " << g << '\n';
  for (auto i : cov.zero_items)
    err << "warning: item " << i << " (" << cov.series.items[i].label << ") is the zero matrix\n";

  MatrixSeries series = cov.series;
  json pca_table = nullptr;
  if (o.pca > 0) {
    const auto ev = explained_variance(series);
    pca_table = ev;
    series = pca_reduce(series, o.pca);
  }

  json j = to_json(series);
  j["ingest"] = {{"symbols", panel.symbols},
                 {"returns", panel.values.rows()},
                 {"dropped_timestamps", panel.dropped_timestamps},
                 {"dropped_groups", cov.dropped_groups},
                 {"zero_items", cov.zero_items},
                 {"rejected_rows", rejected},
                 {"covariance_denominator", "n-1"},
                 {"explained_variance", pca_table}};
  j["manifest"] = manifest.finish(
      {{"prices", o.prices}, {"grouping", grouping.to_string()}, {"pca", o.pca}}, std::nullopt);
  write_json(o.out, j);
  out << "n=" << series.items.size() << " dim=" << series.dim
      << " dropped_groups=" << cov.dropped_groups.size()
      << " zero_matrices=" << cov.zero_items.size() << " -> " << o.out << '\n';
  return kOk;
}

// ---------------------------------------------------------------- detect

struct DetectOptions {
  std::string series;
  std::string out;
  double gamma = 0.5;
  double nu = 1.0;
  double scale = 1.0;
  int max_degree = TruncationPolicy{}.max_degree;
  int nb = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string pvalue_mode = "add_one";
  bool emit_null = false;
};

int cmd_detect(const DetectOptions& o, std::ostream& out, std::ostream& err) {
  Manifest manifest("detect");
  manifest.add_input(o.series);
  const auto series = load_matrix_series(o.series);
  const int n = static_cast<int>(series.items.size());
  if (n < 4) throw InputError("detect needs at least 4 matrices, series has " + std::to_string(n));

  KernelConfig kcfg;
  kcfg.nu = o.nu;
  kcfg.scale = o.scale;
  kcfg.truncation.max_degree = o.max_degree;
  const StatConfig scfg{o.gamma};
  const ResampleConfig rcfg{o.nb, o.alpha, o.seed, parse_pvalue_mode(o.pvalue_mode)};
  scfg.validate();
  rcfg.validate();

  const auto sample = series.matrices();
  const auto g = gram(sample, kcfg);
  warn_about_gram(g, sample, err);
  const auto result = permutation_pvalue(g, scfg, rcfg);
  const auto profile = statistic_profile(g, scfg);
  const bool change = result.p_value <= o.alpha;

  json j;
  j["result"] = to_json(result, o.emit_null);
  j["decision"] = change ? "change point" : "no change point";
  j["k_hat_label"] = item_label(series, result.k_hat);
  j["profile"] = to_json(profile);
  j["kernel"] = kernel_json(kcfg);
  j["kernel"]["degree"] = g.degree();
  j["kernel"]["truncated_entries"] = g.truncated_count();
  j["manifest"] = manifest.finish({{"series", o.series},
                                   {"gamma", o.gamma},
                                   {"nb", o.nb},
                                   {"alpha", o.alpha},
                                   {"pvalue_mode", o.pvalue_mode},
                                   {"emit_null", o.emit_null},
                                   {"kernel", kernel_json(kcfg)}},
                                  o.seed);
  write_json(o.out, j);

  if (change)
    out << "change point detected: k_hat=" << result.k_hat << " (first item " << item_label(series, result.k_hat)
        << "), statistic=" << format_double(result.statistic) << ", p=" << format_double(result.p_value)
        << " <= alpha=" << o.alpha << '\n';
  else
    out << "no change point: p=" << format_double(result.p_value) << " > alpha=" << o.alpha
        << " (statistic=" << format_double(result.statistic) << ", k_hat=" << result.k_hat << ")\n";
  return kOk;
}

// ---------------------------------------------------------------- segment

struct SegmentOptions {
  std::string series;
  std::string out;
  int window = 10;
  int nb = 500;
  double alpha = 0.05;
  double gamma = 0.5;
  double nu = 1.0;
  double scale = 1.0;
  std::string split_mode = "paper_mid";
  std::string pvalue_mode = "add_one";
  std::uint64_t seed = 0;
};

int cmd_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err) {
  Manifest manifest("segment");
  manifest.add_input(o.series);
  const auto series = load_matrix_series(o.series);

  SegmentationConfig cfg;
  cfg.window = o.window;
  cfg.nb = o.nb;
  cfg.alpha = o.alpha;
  cfg.seed = o.seed;
  cfg.gamma = o.gamma;
  cfg.split_mode = parse_split_mode(o.split_mode);
  cfg.pvalue_mode = parse_pvalue_mode(o.pvalue_mode);
  cfg.validate();
  KernelConfig kcfg;
  kcfg.nu = o.nu;
  kcfg.scale = o.scale;

  ChangePointReport report;
  if (!series.items.empty()) {
    const auto sample = series.matrices();
    kcfg.validate(series.dim);
    const auto g = gram(sample, kcfg);
    warn_about_gram(g, sample, err);
    report = binary_segmentation(g, cfg);
  }

  json j = to_json(report);
  json labels = json::array();
  for (int cp : report.change_points) labels.push_back(item_label(series, cp));
  j["change_point_labels"] = labels;
  j["manifest"] = manifest.finish({{"series", o.series},
                                   {"window", o.window},
                                   {"nb", o.nb},
                                   {"alpha", o.alpha},
                                   {"gamma", o.gamma},
                                   {"split_mode", o.split_mode},
                                   {"pvalue_mode", o.pvalue_mode},
                                   {"kernel", kernel_json(kcfg)}},
                                  o.seed);
  write_json(o.out, j);

  out << report.change_points.size() << " change point(s)";
  for (std::size_t i = 0; i < report.change_points.size(); ++i)
    out << (i == 0 ? ": " : ", ") << report.change_points[i] << " (" << labels[i].get<std::string>() << ")";
  out << '\n';
  return kOk;
}

// ---------------------------------------------------------------- power

struct PowerOptions {
  std::string config;
  std::string out;
  int replicates = 500;
  std::uint64_t seed = 0;
};

struct PowerCell {
  std::string name;
  DistributionSpec left, right;
  int n = 40, k = 20;
  double gamma = 0.5;
};

int cmd_power(const PowerOptions& o, std::ostream& out, std::ostream&) {
  Manifest manifest("power");
  manifest.add_input(o.config);
  const auto cfg = read_json(o.config);
  if (!cfg.is_object()) throw InputError(o.config + ": expected an object");
  if (o.replicates < 1) throw InputError("--replicates must be positive");

  KernelConfig kcfg;
  double alpha = 0.05;
  if (cfg.contains("nu")) kcfg.nu = cfg.at("nu").get<double>();
  if (cfg.contains("alpha")) alpha = cfg.at("alpha").get<double>();
  const json cells_json = cfg.value("cells", json::array());
  if (!cells_json.is_array()) throw InputError(o.config + " /cells: expected an array");

  std::vector<PowerCell> cells;
  for (std::size_t i = 0; i < cells_json.size(); ++i) {
    const auto where = "/cells/" + std::to_string(i);
    const auto& c = cells_json[i];
    if (!c.is_object()) throw InputError(o.config + " " + where + ": expected an object");
    auto need_int = [&](const char* key) {
      if (!c.contains(key) || !c[key].is_number_integer())
        throw InputError(o.config + " " + where + "/" + key + ": missing or not an integer");
      return c[key].get<int>();
    };
    PowerCell cell;
    try {
      cell.left = distribution_from_json(c.value("left", json()), where + "/left");
      cell.right = c.contains("right") ? distribution_from_json(c["right"], where + "/right") : cell.left;
    } catch (const InputError& e) {
      throw InputError(o.config + " " + e.what());
    }
    cell.n = need_int("n");
    cell.k = c.contains("k") ? need_int("k") : cell.n / 2;
    cell.gamma = c.value("gamma", 0.5);
    cell.name = c.value("name", cell.left.label() + " | " + cell.right.label());
    if (cell.left.d != cell.right.d)
      throw InputError(o.config + " " + where + ": left and right dimensions differ");
    if (cell.k < 1 || cell.k >= cell.n)
      throw InputError(o.config + " " + where + "/k: must lie in [1, n-1]");
    cells.push_back(std::move(cell));
  }

  json rows = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const ResampleConfig rcfg{1, alpha, derive_seed(o.seed, {i}), PValueMode::add_one};
    const auto r = warp_speed_power(c.left, c.right, c.n, c.k, StatConfig{c.gamma}, kcfg, rcfg,
                                    o.replicates);
    rows.push_back({{"name", c.name},
                    {"left", to_json(c.left)},
                    {"right", to_json(c.right)},
                    {"n", c.n},
                    {"k", c.k},
                    {"gamma", c.gamma},
                    {"replicates", o.replicates},
                    {"rejection_rate", r.rejection_rate},
                    {"rejection_percent", std::lround(100.0 * r.rejection_rate)},
                    {"critical_value", r.critical_value},
                    {"truncated_entries", r.truncated_entries}});
    out << c.name << "  n=" << c.n << " k=" << c.k << " gamma=" << c.gamma << "  rate="
        << format_double(r.rejection_rate) << '\n';
  }
  json j = {{"cells", rows}};
  j["manifest"] = manifest.finish(
      {{"config", o.config}, {"replicates", o.replicates}, {"alpha", alpha}, {"kernel", kernel_json(kcfg)}},
      o.seed);
  write_json(o.out, j);
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&) {
  Manifest manifest("simulate");
  manifest.add_input(o.config);
  const auto cfg = read_json(o.config);
  if (!cfg.is_object() || !cfg.contains("segments") || !cfg["segments"].is_array())
    throw InputError(o.config + " /segments: missing or not an array");

  MatrixSeries series;
  auto rng = make_stream(o.seed, {});
  const auto& segs = cfg["segments"];
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const auto where = "/segments/" + std::to_string(s);
    DistributionSpec spec;
    try {
      spec = distribution_from_json(segs[s].value("dist", json()), where + "/dist");
    } catch (const InputError& e) {
      throw InputError(o.config + " " + e.what());
    }
    if (!segs[s].contains("count") || !segs[s]["count"].is_number_integer() || segs[s]["count"].get<int>() < 0)
      throw InputError(o.config + " " + where + "/count: missing or not a nonnegative integer");
    if (series.dim != 0 && spec.d != series.dim)
      throw InputError(o.config + " " + where + "/dist/d: dimension differs from earlier segments");
    series.dim = spec.d;
    const int count = segs[s]["count"].get<int>();
    for (int i = 0; i < count; ++i) {
      const auto index = static_cast<std::int64_t>(series.items.size());
      series.items.push_back({"segment " + std::to_string(s) + " item " + std::to_string(i), index,
                              index, sample(spec, rng)});
    }
  }
  json j = to_json(series);
  j["manifest"] = manifest.finish({{"config", o.config}, {"segments", segs}}, o.seed);
  write_json(o.out, j);
  out << "n=" << series.items.size() << " dim=" << series.dim << " -> " << o.out << '\n';
  return kOk;
}

// ---------------------------------------------------------------- selftest

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

// e^{-x-y} Γ(ν+1) (xy)^{-ν/2} I_ν(2 sqrt(xy)).
double scalar_kernel_oracle(double nu, double x, double y) {
  const double z = 2.0 * std::sqrt(x * y);
  return std::exp(-x - y + std::lgamma(nu + 1.0)) * std::pow(x * y, -0.5 * nu) * std::cyl_bessel_i(nu, z);
}

Check check_scalar_bessel(int max_degree) {
  KernelConfig cfg;
  cfg.truncation.max_degree = max_degree;
  double worst = 0.0;
  for (double nu : {0.5, 1.0, 2.0}) {
    cfg.nu = nu;
    for (double x : {0.05, 0.7, 2.5, 6.0, 10.0}) {
      for (double y : {0.1, 1.0, 4.0, 9.5}) {
        const auto h = kernel_h(SpdMatrix::diagonal(std::vector{x}), SpdMatrix::diagonal(std::vector{y}), cfg);
        const double ref = scalar_kernel_oracle(nu, x, y);
        worst = std::max(worst, std::abs(h.value - ref) / ref);
      }
    }
  }
  return {"scalar Bessel oracle", worst < 1e-8, "max rel err " + format_double(worst)};
}

Check check_zonal() {
  double worst = 0.0;
  const std::vector<double> x{0.9, 0.35, 0.2, 0.05};
  for (int m = 1; m <= 4; ++m) {
    const std::span<const double> eig(x.data(), static_cast<std::size_t>(m));
    const double tr = std::accumulate(eig.begin(), eig.end(), 0.0);
    const std::vector<double> ones(static_cast<std::size_t>(m), 1.0);
    for (int k = 1; k <= 6; ++k) {
      double sum = 0.0, sum_identity = 0.0;
      for (const auto& kappa : partitions_of_degree(k, m)) {
        sum += zonal_c(kappa, eig);
        const double at_identity = zonal_c(kappa, ones);
        sum_identity += at_identity;
        worst = std::max(worst, std::abs(at_identity - std::exp(log_zonal_at_identity(kappa, m))) / at_identity);
      }
      worst = std::max(worst, std::abs(sum - std::pow(tr, k)) / std::pow(tr, k));
      worst = std::max(worst, std::abs(sum_identity - std::pow(m, k)) / std::pow(m, k));
    }
  }
  return {"zonal normalization", worst < 1e-10, "max rel err " + format_double(worst)};
}

Check check_gram_psd(int max_degree) {
  KernelConfig cfg;
  cfg.truncation.max_degree = max_degree;
  auto rng = make_stream(20240601, {});
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const auto w = wishart_spec(2, 2.5, id);
  const auto iw = inv_wishart_spec(2, 4.0, 2.5 * id);
  std::vector<SpdMatrix> sample;
  for (int i = 0; i < 20; ++i) sample.push_back(hankelcp::sample(i % 2 ? iw : w, rng));
  const auto g = gram(sample, cfg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.values(), Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  const double tr = g.values().trace();
  return {"Gram PSD", min_eig >= -1e-8 * tr, "min eigenvalue / trace " + format_double(min_eig / tr)};
}

Check check_prefix_sums() {
  auto rng = make_stream(7, {});
  std::normal_distribution<double> normal;
  const int n = 11;
  Eigen::MatrixXd f(n, 4);
  for (auto& v : f.reshaped()) v = normal(rng);
  const KernelGram g(f * f.transpose(), std::vector<std::uint8_t>(n * n, 0), {}, 0);
  const auto profile = statistic_profile(g, {0.5});
  double worst = 0.0;
  for (int k = 1; k < n; ++k)
    worst = std::max(worst, std::abs(profile.bracket[static_cast<std::size_t>(k - 1)] - two_sample_bracket(g, k)));
  return {"prefix sums vs naive", worst < 1e-12, "max abs err " + format_double(worst)};
}

int cmd_selftest(int max_degree, std::ostream& out) {
  TruncationPolicy{max_degree}.validate();
  const std::vector<Check> checks{check_scalar_bessel(max_degree), check_zonal(),
                                  check_gram_psd(max_degree), check_prefix_sums()};
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(24) << c.name << c.detail << '\n';
    ok = ok && c.pass;
  }
  out << (ok ? "all checks passed" : "self-test FAILED") << '\n';
  return ok ? kOk : kSelfTestFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change-point detection for sequences of SPD matrices", "hankelcp"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: HANKELCP_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  IngestOptions ingest;
  auto* ing = app.add_subcommand("ingest", "Price CSVs -> covariance-matrix series");
  ing->add_option("--prices", ingest.prices, "Price CSV files, one per symbol")->required();
  ing->add_option("--grouping", ingest.grouping, "day, hour or count:N")->capture_default_str();
  ing->add_option("--pca", ingest.pca, "Reduce to diag of the p largest eigenvalues");
  ing->add_option("--out", ingest.out, "Output series JSON")->required();

  DetectOptions detect;
  auto* det = app.add_subcommand("detect", "Single change-point test with permutation p-value");
  det->add_option("--series", detect.series, "Matrix series JSON")->required();
  det->add_option("--gamma", detect.gamma)->capture_default_str();
  det->add_option("--nu", detect.nu)->capture_default_str();
  det->add_option("--scale", detect.scale, "Multiply every matrix before the kernel")->capture_default_str();
  det->add_option("--nb", detect.nb, "Permutations")->capture_default_str();
  det->add_option("--alpha", detect.alpha)->capture_default_str();
  det->add_option("--seed", detect.seed)->capture_default_str();
  det->add_option("--pvalue-mode", detect.pvalue_mode)
      ->check(CLI::IsMember({"add_one", "paper_strict"}))
      ->capture_default_str();
  det->add_flag("--emit-null", detect.emit_null, "Include the permutation statistics");
  det->add_option("--max-degree", detect.max_degree, "Series truncation degree")->capture_default_str();
  det->add_option("--out", detect.out, "Result JSON")->required();

  SegmentOptions seg;
  auto* sg = app.add_subcommand("segment", "Binary segmentation for multiple change points");
  sg->add_option("--series", seg.series, "Matrix series JSON")->required();
  sg->add_option("--window", seg.window, "Minimum segment length")->capture_default_str();
  sg->add_option("--nb", seg.nb)->capture_default_str();
  sg->add_option("--alpha", seg.alpha)->capture_default_str();
  sg->add_option("--gamma", seg.gamma)->capture_default_str();
  sg->add_option("--nu", seg.nu)->capture_default_str();
  sg->add_option("--scale", seg.scale)->capture_default_str();
  sg->add_option("--split-mode", seg.split_mode)
      ->check(CLI::IsMember({"paper_mid", "at_changepoint"}))
      ->capture_default_str();
  sg->add_option("--pvalue-mode", seg.pvalue_mode)
      ->check(CLI::IsMember({"add_one", "paper_strict"}))
      ->capture_default_str();
  sg->add_option("--seed", seg.seed)->capture_default_str();
  sg->add_option("--out", seg.out, "Report JSON")->required();

  PowerOptions power;
  auto* pw = app.add_subcommand("power", "Warp-speed power table for distribution pairs");
  pw->add_option("--config", power.config, "Experiment JSON with a cells list")->required();
  pw->add_option("--replicates", power.replicates)->capture_default_str();
  pw->add_option("--seed", power.seed)->capture_default_str();
  pw->add_option("--out", power.out, "Table JSON")->required();

  SimulateOptions sim;
  auto* sm = app.add_subcommand("simulate", "Draw a synthetic matrix series from segment specs");
  sm->add_option("--config", sim.config, "JSON with a segments list")->required();
  sm->add_option("--seed", sim.seed)->capture_default_str();
  sm->add_option("--out", sim.out, "Output series JSON")->required();

  int selftest_degree = TruncationPolicy{}.max_degree;
  auto* st = app.add_subcommand("selftest", "Numerical self-checks");
  st->add_option("--max-degree", selftest_degree)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (*ing) return cmd_ingest(ingest, out, err);
    if (*det) return cmd_detect(detect, out, err);
    if (*sg) return cmd_segment(seg, out, err);
    if (*pw) return cmd_power(power, out, err);
    if (*sm) return cmd_simulate(sim, out, err);
    if (*st) return cmd_selftest(selftest_degree, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace hankelcp::cli

#include "hankelcp/distributions.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hankelcp/error.hpp"

namespace hankelcp {

std::string to_string(Family family) {
  switch (family) {
    case Family::wishart: return "wishart";
    case Family::inv_wishart: return "inv_wishart";
    case Family::cov_uniform: return "cov_uniform";
    case Family::cov_t: return "cov_t";
  }
  return "unknown";
}

Family parse_family(const std::string& text) {
  if (text == "wishart") return Family::wishart;
  if (text == "inv_wishart") return Family::inv_wishart;
  if (text == "cov_uniform") return Family::cov_uniform;
  if (text == "cov_t") return Family::cov_t;
  throw InputError("unknown distribution family '" + text + "'");
}

std::string to_string(WishartParam param) {
  return param == WishartParam::density ? "density" : "dof_scale";
}

WishartParam parse_wishart_param(const std::string& text) {
  if (text == "density") return WishartParam::density;
  if (text == "dof_scale") return WishartParam::dof_scale;
  throw InputError("unknown wishart parametrization '" + text + "' (expected density or dof_scale)");
}

namespace {

bool uses_shape(Family f) { return f != Family::cov_uniform; }
bool uses_vectors(Family f) { return f == Family::cov_uniform || f == Family::cov_t; }

Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw InputError("scale matrix is not positive definite");
  return llt.matrixL();
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
}

}  // namespace

void DistributionSpec::validate() const {
  if (d < 1) throw InputError("dimension d must be positive");
  if (uses_shape(family)) {
    if (!std::isfinite(a)) throw InputError("shape a must be finite");
    if (sigma.rows() != d || sigma.cols() != d)
      throw InputError("sigma must be " + std::to_string(d) + "x" + std::to_string(d));
    if (!sigma.allFinite() || (sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
                                  1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
      throw InputError("sigma must be finite and symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(sigma).info() != Eigen::Success)
      throw InputError("sigma must be positive definite");
  }
  switch (family) {
    case Family::wishart:
      if (parametrization == WishartParam::density && !(a > 0.5 * (d - 1)))
        throw InputError("wishart requires a > (d-1)/2, got a=" + std::to_string(a));
      if (parametrization == WishartParam::dof_scale && !(a > d - 1))
        throw InputError("dof_scale wishart requires a > d-1, got a=" + std::to_string(a));
      break;
    case Family::inv_wishart:
      if (!(a > d - 1))
        throw InputError("inv_wishart requires a > d-1 to sample, got a=" + std::to_string(a));
      break;
    case Family::cov_t:
      if (!(a > 0.0)) throw InputError("cov_t requires a > 0");
      break;
    case Family::cov_uniform: break;
  }
  if (uses_vectors(family) && n_vec < d + 1)
    throw InputError("n_vec must be at least d+1 = " + std::to_string(d + 1));
}

std::string DistributionSpec::label() const {
  std::ostringstream os;
  os << to_string(family) << "(d=" << d;
  if (uses_shape(family)) os << ", a=" << a;
  if (family == Family::wishart && parametrization == WishartParam::dof_scale) os << ", dof_scale";
  if (uses_vectors(family)) os << ", n_vec=" << n_vec;
  os << ")";
  return os.str();
}

DistributionSpec wishart_spec(int d, double a, Eigen::MatrixXd sigma) {
  return {Family::wishart, d, a, std::move(sigma), 0, WishartParam::density};
}

DistributionSpec inv_wishart_spec(int d, double a, Eigen::MatrixXd sigma) {
  return {Family::inv_wishart, d, a, std::move(sigma), 0, WishartParam::density};
}

DistributionSpec cov_uniform_spec(int d, int n_vec) {
  return {Family::cov_uniform, d, 0.0, Eigen::MatrixXd::Identity(d, d),
          n_vec > 0 ? n_vec : 2 * (d + 1), WishartParam::density};
}

DistributionSpec cov_t_spec(int d, double a, Eigen::MatrixXd sigma, int n_vec) {
  return {Family::cov_t, d, a, std::move(sigma), n_vec > 0 ? n_vec : 2 * (d + 1),
          WishartParam::density};
}

Eigen::MatrixXd bartlett_wishart(double dof, const Eigen::MatrixXd& scale_chol, Rng& rng) {
  const auto d = scale_chol.rows();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi2(dof - static_cast<double>(i));
    t(i, i) = std::sqrt(chi2(rng));
    for (Eigen::Index j = 0; j < i; ++j) t(i, j) = normal(rng);
  }
  const Eigen::MatrixXd lt = scale_chol * t;
  return lt * lt.transpose();
}

SpdMatrix sample_wishart(const DistributionSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.parametrization == WishartParam::dof_scale)
    return SpdMatrix(bartlett_wishart(spec.a, lower_cholesky(spec.sigma), rng));
  const Eigen::MatrixXd scale = (2.0 * spec.sigma).inverse();
  return SpdMatrix(bartlett_wishart(2.0 * spec.a, lower_cholesky(scale), rng));
}

SpdMatrix sample_inv_wishart(const DistributionSpec& spec, Rng& rng) {
  spec.validate();
  const Eigen::MatrixXd w = bartlett_wishart(spec.a, lower_cholesky(spec.sigma.inverse()), rng);
  const Eigen::MatrixXd inv = w.llt().solve(Eigen::MatrixXd::Identity(spec.d, spec.d));
  return SpdMatrix(0.5 * (inv + inv.transpose()));
}

SpdMatrix sample_cov_uniform(const DistributionSpec& spec, Rng& rng) {
  spec.validate();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd rows(spec.n_vec, spec.d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = unif(rng);
  return SpdMatrix(sample_covariance(rows));
}

SpdMatrix sample_cov_t(const DistributionSpec& spec, Rng& rng) {
  spec.validate();
  const Eigen::MatrixXd l = lower_cholesky(spec.sigma);
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi2(spec.a);
  Eigen::MatrixXd rows(spec.n_vec, spec.d);
  Eigen::VectorXd z(spec.d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (auto& v : z) v = normal(rng);
    const double mix = std::sqrt(spec.a / chi2(rng));
    rows.row(i) = (l * z).transpose() * mix;
  }
  return SpdMatrix(sample_covariance(rows));
}

SpdMatrix sample(const DistributionSpec& spec, Rng& rng) {
  switch (spec.family) {
    case Family::wishart: return sample_wishart(spec, rng);
    case Family::inv_wishart: return sample_inv_wishart(spec, rng);
    case Family::cov_uniform: return sample_cov_uniform(spec, rng);
    case Family::cov_t: return sample_cov_t(spec, rng);
  }
  throw InputError("unknown distribution family");
}

Eigen::MatrixXd expected_value(const DistributionSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::wishart:
      if (spec.parametrization == WishartParam::dof_scale) return spec.a * spec.sigma;
      return spec.a * spec.sigma.inverse();
    case Family::inv_wishart:
      if (!(spec.a > spec.d + 1))
        throw DomainError("inv_wishart mean requires a > d+1");
      return spec.sigma / (spec.a - spec.d - 1);
    case Family::cov_uniform: return Eigen::MatrixXd::Identity(spec.d, spec.d) / 12.0;
    case Family::cov_t:
      if (!(spec.a > 2.0)) throw DomainError("cov_t mean requires a > 2");
      return spec.a / (spec.a - 2.0) * spec.sigma;
  }
  throw InputError("unknown distribution family");
}

DistributionSpec distribution_from_json(const nlohmann::json& j, const std::string& where) {
  auto fail = [&](const std::string& key, const std::string& what) -> InputError {
    return InputError(where + "/" + key + ": " + what);
  };
  if (!j.is_object()) throw InputError((where.empty() ? "/" : where) + ": expected an object");
  if (!j.contains("family") || !j["family"].is_string()) throw fail("family", "missing or not a string");
  if (!j.contains("d") || !j["d"].is_number_integer()) throw fail("d", "missing or not an integer");

  DistributionSpec s;
  try {
    s.family = parse_family(j["family"].get<std::string>());
  } catch (const InputError& e) {
    throw fail("family", e.what());
  }
  s.d = j["d"].get<int>();
  if (s.d < 1) throw fail("d", "must be positive");

  if (uses_shape(s.family)) {
    if (!j.contains("a") || !j["a"].is_number()) throw fail("a", "missing or not a number");
    s.a = j["a"].get<double>();
  } else {
    s.a = 0.0;
  }

  s.sigma = Eigen::MatrixXd::Identity(s.d, s.d);
  if (j.contains("sigma")) {
    const auto& sj = j["sigma"];
    if (sj.is_number()) {
      s.sigma *= sj.get<double>();
    } else if (sj.is_array() && sj.size() == static_cast<std::size_t>(s.d)) {
      for (int r = 0; r < s.d; ++r) {
        const auto& row = sj[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(s.d))
          throw fail("sigma/" + std::to_string(r), "expected " + std::to_string(s.d) + " entries");
        for (int c = 0; c < s.d; ++c) {
          const auto& v = row[static_cast<std::size_t>(c)];
          if (!v.is_number())
            throw fail("sigma/" + std::to_string(r) + "/" + std::to_string(c), "not a number");
          s.sigma(r, c) = v.get<double>();
        }
      }
    } else {
      throw fail("sigma", "expected a number or a " + std::to_string(s.d) + "x" +
                              std::to_string(s.d) + " matrix");
    }
  }

  s.n_vec = 2 * (s.d + 1);
  if (j.contains("n_vec")) {
    if (!j["n_vec"].is_number_integer()) throw fail("n_vec", "not an integer");
    s.n_vec = j["n_vec"].get<int>();
  }
  if (!uses_vectors(s.family)) s.n_vec = 0;

  if (j.contains("parametrization")) {
    if (s.family != Family::wishart) throw fail("parametrization", "only applies to wishart");
    if (!j["parametrization"].is_string()) throw fail("parametrization", "not a string");
    try {
      s.parametrization = parse_wishart_param(j["parametrization"].get<std::string>());
    } catch (const InputError& e) {
      throw fail("parametrization", e.what());
    }
  }

  try {
    s.validate();
  } catch (const InputError& e) {
    throw InputError((where.empty() ? "/" : where) + ": " + e.what());
  }
  return s;
}

nlohmann::json to_json(const DistributionSpec& spec) {
  nlohmann::json j = {{"family", to_string(spec.family)}, {"d", spec.d}};
  if (uses_shape(spec.family)) {
    j["a"] = spec.a;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < spec.sigma.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(spec.sigma.cols()));
      for (Eigen::Index c = 0; c < spec.sigma.cols(); ++c) row[static_cast<std::size_t>(c)] = spec.sigma(r, c);
      rows.push_back(row);
    }
    j["sigma"] = rows;
  }
  if (uses_vectors(spec.family)) j["n_vec"] = spec.n_vec;
  if (spec.family == Family::wishart) j["parametrization"] = to_string(spec.parametrization);
  return j;
}

}  // namespace hankelcp

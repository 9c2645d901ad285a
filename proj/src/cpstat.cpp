#include "hankelcp/cpstat.hpp"

#include <cmath>
#include <string>

#include "hankelcp/error.hpp"

namespace hankelcp {

void StatConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("gamma must lie in (0, 1]");
}

double split_weight(int n, int k, double gamma) {
  const double nd = n;
  return std::pow(static_cast<double>(k) * (n - k) / (nd * nd), gamma);
}

namespace {

// Calls visit(k, bracket, weighted) for k = 1..len-1.
template <class Visit>
void scan_profile(const Eigen::MatrixXd& values, std::span<const int> order, double gamma,
                  Visit&& visit) {
  const auto len = static_cast<Eigen::Index>(order.size());
  if (len < 2) throw InputError("change-point statistic needs at least 2 observations");
  for (int idx : order) {
    if (idx < 0 || idx >= values.rows())
      throw InputError("statistic: index " + std::to_string(idx) + " outside the Gram matrix");
  }

  Eigen::MatrixXd h(len, len);
  for (Eigen::Index b = 0; b < len; ++b)
    for (Eigen::Index a = 0; a < len; ++a) h(a, b) = values(order[a], order[b]);

  const Eigen::VectorXd row_total = h.rowwise().sum();
  const double grand = row_total.sum();
  const double nd = static_cast<double>(len);

  double within = 0.0;  // A(k): Σ_{i,j<k} H_ij
  double prefix = 0.0;  // S(k): Σ_{i<k} T_i
  for (Eigen::Index k = 1; k < len; ++k) {
    const Eigen::Index last = k - 1;
    double cross_last = 0.0;
    for (Eigen::Index j = 0; j < last; ++j) cross_last += h(j, last);
    within += 2.0 * cross_last + h(last, last);
    prefix += row_total(last);
    const double cross = prefix - within;                // C(k)
    const double right = grand - 2.0 * prefix + within;  // B(k)
    const double kd = static_cast<double>(k);
    const double rd = nd - kd;
    const double bracket = within / (kd * kd) + right / (rd * rd) - 2.0 * cross / (kd * rd);
    const double weighted =
        split_weight(static_cast<int>(len), static_cast<int>(k), gamma) * (kd * rd / nd) * bracket;
    visit(static_cast<int>(k), bracket, weighted);
  }
}

std::vector<int> identity_order(int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  return order;
}

}  // namespace

StatProfile statistic_profile(const Eigen::MatrixXd& values, std::span<const int> order,
                              const StatConfig& cfg) {
  cfg.validate();
  StatProfile p;
  p.n = static_cast<int>(order.size());
  p.gamma = cfg.gamma;
  scan_profile(values, order, cfg.gamma, [&](int k, double bracket, double weighted) {
    p.bracket.push_back(bracket);
    p.weighted.push_back(weighted);
    if (k == 1 || weighted > p.max_value) {
      p.max_value = weighted;
      p.argmax_k = k;
    }
  });
  return p;
}

StatProfile statistic_profile(const KernelGram& gram, const StatConfig& cfg) {
  const auto order = identity_order(gram.n());
  return statistic_profile(gram.values(), order, cfg);
}

StatMax statistic_value(const Eigen::MatrixXd& values, std::span<const int> order,
                        const StatConfig& cfg) {
  cfg.validate();
  StatMax best;
  scan_profile(values, order, cfg.gamma, [&](int k, double, double weighted) {
    if (k == 1 || weighted > best.value) best = {weighted, k};
  });
  return best;
}

double two_sample_bracket(const KernelGram& gram, int k) {
  const int n = gram.n();
  if (k < 1 || k > n - 1)
    throw InputError("split k=" + std::to_string(k) + " outside [1, " + std::to_string(n - 1) + "]");
  const auto& h = gram.values();
  double left = 0.0, right = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i < k && j < k)
        left += h(i, j);
      else if (i >= k && j >= k)
        right += h(i, j);
      else if (i < k && j >= k)
        cross += h(i, j);
    }
  }
  const double kd = k, rd = n - k;
  return left / (kd * kd) + right / (rd * rd) - 2.0 * cross / (kd * rd);
}

StatMax statistic_max(const StatProfile& profile) {
  if (profile.weighted.empty()) throw InputError("statistic_max: empty profile");
  StatMax best{profile.weighted.front(), 1};
  for (std::size_t i = 1; i < profile.weighted.size(); ++i) {
    if (profile.weighted[i] > best.value) best = {profile.weighted[i], static_cast<int>(i) + 1};
  }
  return best;
}

nlohmann::json to_json(const StatProfile& profile) {
  std::vector<int> ks(profile.bracket.size());
  for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = static_cast<int>(i) + 1;
  return {{"n", profile.n},
          {"gamma", profile.gamma},
          {"k", ks},
          {"bracket", profile.bracket},
          {"weighted", profile.weighted},
          {"max", profile.max_value},
          {"k_hat", profile.argmax_k}};
}

}  // namespace hankelcp

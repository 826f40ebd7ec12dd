#pragma once

// Simulation scenarios: what to generate, which estimators to run on it, and
// how many seeded replications. Presets cover the standard simulation grid; the
// `_desk` variants shrink n and R so a laptop finishes in minutes.

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pinull/dependence.hpp"
#include "pinull/normal.hpp"

namespace pinull {

enum class EstimatorKind { bh, storey_smoother, storey_bootstrap, patra_sen_fixed, patra_sen_cv };

inline const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::bh: return "bh";
    case EstimatorKind::storey_smoother: return "storey_smoother";
    case EstimatorKind::storey_bootstrap: return "storey_bootstrap";
    case EstimatorKind::patra_sen_fixed: return "patra_sen_fixed";
    case EstimatorKind::patra_sen_cv: return "patra_sen_cv";
  }
  return "?";
}

inline EstimatorKind parse_estimator_kind(std::string_view s) {
  for (auto k : {EstimatorKind::bh, EstimatorKind::storey_smoother, EstimatorKind::storey_bootstrap,
                 EstimatorKind::patra_sen_fixed, EstimatorKind::patra_sen_cv})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown estimator '" + std::string(s) + "'");
}

/// Tuning parameters. Unset fields fall back to each estimator's default where
/// one exists; B, candidate_cs and folds have none and must be given when the
/// estimator that needs them is selected.
struct EstimatorParams {
  std::optional<std::size_t> B;
  std::optional<std::vector<double>> lambda_grid;
  std::optional<double> gamma_step;
  std::optional<std::vector<double>> candidate_cs;
  std::optional<std::size_t> folds;
  std::optional<double> c_n;  // overrides 0.1 log log n for patra_sen_fixed
};

struct Scenario {
  std::string name;
  std::size_t n = 1000;
  std::vector<double> pi0_list;
  GaussianMixtureSpec mixture;  // pi0 is overwritten per grid point
  DependenceSpec dependence;
  std::set<EstimatorKind> estimators;
  std::size_t replications = 100;
  std::uint64_t base_seed = 1;
  EstimatorParams params;

  bool uses(EstimatorKind k) const { return estimators.count(k) > 0; }

  void validate() const {
    if (n < 2) throw std::invalid_argument("scenario " + name + ": n must be >= 2");
    if (replications < 1) throw std::invalid_argument("scenario " + name + ": replications must be >= 1");
    if (pi0_list.empty()) throw std::invalid_argument("scenario " + name + ": empty pi0_list");
    for (double p : pi0_list)
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("scenario " + name + ": pi0 values must lie in [0,1]");
    if (estimators.empty()) throw std::invalid_argument("scenario " + name + ": no estimators");
    GaussianMixtureSpec m = mixture;
    m.pi0 = 1.0;
    m.validate();
    dependence.validate();

    const auto mismatch = [&](const std::string& what) {
      throw std::invalid_argument("scenario " + name + ": " + what);
    };
    const bool storey = uses(EstimatorKind::storey_smoother) || uses(EstimatorKind::storey_bootstrap);
    const bool ps = uses(EstimatorKind::patra_sen_fixed) || uses(EstimatorKind::patra_sen_cv);
    if (uses(EstimatorKind::storey_bootstrap) && !params.B) mismatch("storey_bootstrap needs B");
    if (params.B && !uses(EstimatorKind::storey_bootstrap)) mismatch("B given without storey_bootstrap");
    if (params.B && *params.B < 1) mismatch("B must be >= 1");
    if (params.lambda_grid && !storey) mismatch("lambda_grid given without a storey estimator");
    if (params.gamma_step && !ps) mismatch("gamma_step given without a patra_sen estimator");
    if (uses(EstimatorKind::patra_sen_cv) && (!params.candidate_cs || !params.folds))
      mismatch("patra_sen_cv needs candidate_cs and folds");
    if ((params.candidate_cs || params.folds) && !uses(EstimatorKind::patra_sen_cv))
      mismatch("candidate_cs/folds given without patra_sen_cv");
    if (params.c_n && !uses(EstimatorKind::patra_sen_fixed))
      mismatch("c_n given without patra_sen_fixed");
    if (dependence.is<dependence::Block>()) {
      const auto& b = std::get<dependence::Block>(dependence.kind());
      std::size_t total = 0;
      for (auto s : b.sizes) total += s;
      if (total != n) mismatch("block sizes sum to " + std::to_string(total) + ", n = " + std::to_string(n));
    }
  }
};

namespace detail {

inline const std::vector<double>& bh_pi0_grid() {
  static const std::vector<double> g{0.5, 0.75, 0.8, 0.9, 0.95, 1.0};
  return g;
}

inline const std::vector<double>& wide_pi0_grid() {
  static const std::vector<double> g{0.5, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.98};
  return g;
}

inline const std::vector<double>& block_correlations() {
  static const std::vector<double> c{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  return c;
}

inline Scenario bh_table(std::string name, std::size_t n, DependenceSpec dep) {
  Scenario s;
  s.name = std::move(name);
  s.n = n;
  s.pi0_list = bh_pi0_grid();
  s.dependence = std::move(dep);
  s.estimators = {EstimatorKind::bh};
  s.replications = 10000;
  return s;
}

inline Scenario storey_table(std::string name, std::size_t n, DependenceSpec dep) {
  Scenario s;
  s.name = std::move(name);
  s.n = n;
  s.pi0_list = wide_pi0_grid();
  s.dependence = std::move(dep);
  s.estimators = {EstimatorKind::storey_bootstrap, EstimatorKind::storey_smoother};
  s.params.B = 100;
  return s;
}

inline Scenario ps_table(std::string name, std::size_t n, DependenceSpec dep) {
  Scenario s;
  s.name = std::move(name);
  s.n = n;
  s.pi0_list = wide_pi0_grid();
  s.dependence = std::move(dep);
  s.estimators = {EstimatorKind::patra_sen_fixed, EstimatorKind::patra_sen_cv};
  s.params.candidate_cs = std::vector<double>{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  s.params.folds = 10;
  return s;
}

// Desk variant: n capped at 10^4 (blocks rescaled), BH R = 200, others R = 100.
inline Scenario desk(Scenario s) {
  s.name += "_desk";
  s.replications = s.uses(EstimatorKind::bh) ? 200 : 100;
  constexpr std::size_t cap = 10000;
  if (s.n > cap) {
    if (s.dependence.is<dependence::Block>()) {
      auto b = std::get<dependence::Block>(s.dependence.kind());
      const std::size_t per = cap / b.sizes.size();
      std::fill(b.sizes.begin(), b.sizes.end(), per);
      s.n = per * b.sizes.size();
      s.dependence = DependenceSpec(b);
    } else {
      s.n = cap;
    }
  }
  return s;
}

}  // namespace detail

/// Named presets, full scale and `_desk`.
inline std::map<std::string, Scenario> builtin_scenarios() {
  using detail::bh_table;
  using detail::ps_table;
  using detail::storey_table;
  const auto& rho = detail::block_correlations();
  std::vector<Scenario> full{
      bh_table("table1", 10000, DependenceSpec::iid()),
      bh_table("table2", 10000000, DependenceSpec::iid()),
      bh_table("table3", 1000, DependenceSpec::mdep_equal(2)),
      bh_table("table4", 1000, DependenceSpec::mdep_equal(5)),
      bh_table("table5", 10000, DependenceSpec::mdep_equal(2)),
      bh_table("table6", 10000, DependenceSpec::mdep_equal(5)),
      bh_table("table7", 1000, DependenceSpec::equal_blocks(10, 100, rho)),
      bh_table("table8", 10000, DependenceSpec::equal_blocks(10, 1000, rho)),

      storey_table("table9", 1000, DependenceSpec::ar1(0.1)),
      storey_table("table9_a02", 1000, DependenceSpec::ar1(0.2)),
      storey_table("table10", 1000, DependenceSpec::ar1(0.5)),
      storey_table("table10_a075", 1000, DependenceSpec::ar1(0.75)),
      storey_table("table11", 1000, DependenceSpec::mdep_triangular(1)),
      storey_table("table11_m2", 1000, DependenceSpec::mdep_triangular(2)),
      storey_table("table12", 1000, DependenceSpec::mdep_equal(1)),
      storey_table("table12_m2", 1000, DependenceSpec::mdep_equal(2)),
      storey_table("table12_m5", 1000, DependenceSpec::mdep_equal(5)),
      storey_table("storey_mdep_equal_1e6", 1000000, DependenceSpec::mdep_equal(1)),
      storey_table("storey_block10", 1000, DependenceSpec::equal_blocks(10, 100, rho)),
      storey_table("storey_block200", 1000, DependenceSpec::equal_blocks(200, 5, rho)),

      ps_table("table13", 1000, DependenceSpec::ar1(0.1)),
      ps_table("table13_a02", 1000, DependenceSpec::ar1(0.2)),
      ps_table("table14", 1000, DependenceSpec::ar1(0.5)),
      ps_table("table14_a075", 1000, DependenceSpec::ar1(0.75)),
      ps_table("table15", 1000, DependenceSpec::mdep_triangular(1)),
      ps_table("table15_m2", 1000, DependenceSpec::mdep_triangular(2)),
      ps_table("table15_m5", 1000, DependenceSpec::mdep_triangular(5)),
      ps_table("table16", 1000, DependenceSpec::mdep_equal(1)),
      ps_table("table16_m2", 1000, DependenceSpec::mdep_equal(2)),
      ps_table("table16_m5", 1000, DependenceSpec::mdep_equal(5)),
      ps_table("ps_block5", 1000, DependenceSpec::equal_blocks(200, 5, rho)),
      ps_table("ps_block100", 1000, DependenceSpec::equal_blocks(10, 100, rho)),
  };
  std::map<std::string, Scenario> out;
  for (auto& s : full) {
    auto d = detail::desk(s);
    out.emplace(d.name, std::move(d));
    out.emplace(s.name, std::move(s));
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline double parse_double(std::string_view s, const std::string& where) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(where + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t parse_unsigned(std::string_view s, const std::string& where) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(where + ": expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

inline std::vector<double> parse_double_list(std::string_view s, const std::string& where) {
  std::vector<double> v;
  for (auto item : split_list(s)) v.push_back(parse_double(item, where));
  return v;
}

}  // namespace detail

/// Reads a flat key=value scenario description. `origin` names the source in
/// error messages. Keys:
///   name, n, pi0_list, mu_alt, sigma, replications, base_seed, estimators,
///   dependence (iid | ar1 | mdep_equal | mdep_triangular | block),
///   a, m, block_sizes | block_count + block_size, block_correlations,
///   B, lambda_grid, gamma_step, candidate_cs, folds, c_n
inline Scenario parse_scenario(std::istream& in, const std::string& origin = "<scenario>") {
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = detail::trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) throw std::invalid_argument(where + ": expected key=value");
    std::string key(detail::trim(v.substr(0, eq)));
    if (kv.count(key)) throw std::invalid_argument(where + ": duplicate key '" + key + "'");
    kv[key] = {std::string(detail::trim(v.substr(eq + 1))), lineno};
  }

  static const std::set<std::string> known{
      "name", "n", "pi0_list", "mu_alt", "sigma", "replications", "base_seed", "estimators",
      "dependence", "a", "m", "block_sizes", "block_count", "block_size", "block_correlations",
      "B", "lambda_grid", "gamma_step", "candidate_cs", "folds", "c_n"};
  for (const auto& [k, v] : kv)
    if (!known.count(k))
      throw std::invalid_argument(origin + ":" + std::to_string(v.second) + ": unknown key '" + k + "'");

  auto where = [&](const std::string& k) {
    const auto it = kv.find(k);
    return it == kv.end() ? origin : origin + ":" + std::to_string(it->second.second);
  };
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    if (auto it = kv.find(k); it != kv.end()) return it->second.first;
    return std::nullopt;
  };
  auto need = [&](const std::string& k) -> std::string {
    if (auto v = get(k)) return *v;
    throw std::invalid_argument(origin + ": missing required key '" + k + "'");
  };
  auto used = [&](const std::string& k) { return kv.count(k) > 0; };

  Scenario s;
  s.name = need("name");
  s.n = detail::parse_unsigned(need("n"), where("n"));
  s.pi0_list = detail::parse_double_list(need("pi0_list"), where("pi0_list"));
  if (auto v = get("mu_alt")) s.mixture.mu_alt = detail::parse_double(*v, where("mu_alt"));
  if (auto v = get("sigma")) s.mixture.sigma = detail::parse_double(*v, where("sigma"));
  if (auto v = get("replications")) s.replications = detail::parse_unsigned(*v, where("replications"));
  if (auto v = get("base_seed")) s.base_seed = detail::parse_unsigned(*v, where("base_seed"));
  const std::string estimator_list = need("estimators");
  for (auto e : detail::split_list(estimator_list)) {
    try {
      s.estimators.insert(parse_estimator_kind(e));
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(where("estimators") + ": " + err.what());
    }
  }

  const std::string dep = get("dependence").value_or("iid");
  const auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (used(k))
        throw std::invalid_argument(where(k) + ": key '" + k + "' does not apply to dependence=" + dep);
  };
  if (dep == "iid") {
    forbid({"a", "m", "block_sizes", "block_count", "block_size", "block_correlations"});
  } else if (dep == "ar1") {
    forbid({"m", "block_sizes", "block_count", "block_size", "block_correlations"});
    s.dependence = DependenceSpec::ar1(detail::parse_double(need("a"), where("a")));
  } else if (dep == "mdep_equal" || dep == "mdep_triangular") {
    forbid({"a", "block_sizes", "block_count", "block_size", "block_correlations"});
    const auto m = static_cast<int>(detail::parse_unsigned(need("m"), where("m")));
    s.dependence = dep == "mdep_equal" ? DependenceSpec::mdep_equal(m) : DependenceSpec::mdep_triangular(m);
  } else if (dep == "block") {
    forbid({"a", "m"});
    std::vector<std::size_t> sizes;
    if (used("block_sizes")) {
      if (used("block_count") || used("block_size"))
        throw std::invalid_argument(where("block_sizes") +
                                    ": give either block_sizes or block_count + block_size");
      const std::string size_list = need("block_sizes");
      for (auto item : detail::split_list(size_list))
        sizes.push_back(detail::parse_unsigned(item, where("block_sizes")));
    } else {
      const auto count = detail::parse_unsigned(need("block_count"), where("block_count"));
      const auto size = detail::parse_unsigned(need("block_size"), where("block_size"));
      sizes.assign(count, size);
    }
    std::vector<double> corr = detail::block_correlations();
    if (auto v = get("block_correlations")) corr = detail::parse_double_list(*v, where("block_correlations"));
    s.dependence = DependenceSpec::block(std::move(sizes), std::move(corr));
  } else {
    throw std::invalid_argument(where("dependence") + ": unknown dependence '" + dep + "'");
  }

  if (auto v = get("B")) s.params.B = detail::parse_unsigned(*v, where("B"));
  if (auto v = get("lambda_grid")) s.params.lambda_grid = detail::parse_double_list(*v, where("lambda_grid"));
  if (auto v = get("gamma_step")) s.params.gamma_step = detail::parse_double(*v, where("gamma_step"));
  if (auto v = get("candidate_cs")) s.params.candidate_cs = detail::parse_double_list(*v, where("candidate_cs"));
  if (auto v = get("folds")) s.params.folds = detail::parse_unsigned(*v, where("folds"));
  if (auto v = get("c_n")) s.params.c_n = detail::parse_double(*v, where("c_n"));

  s.validate();
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

}  // namespace pinull

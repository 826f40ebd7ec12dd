#pragma once

// Self-checks that compare the estimators against closed forms or exhaustive
// search. Each returns named statistics plus a verdict; the CLI prints them and
// the test suites assert on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pinull/bh.hpp"
#include "pinull/dependence.hpp"
#include "pinull/ecdf.hpp"
#include "pinull/patra_sen.hpp"
#include "pinull/storey.hpp"

namespace pinull {

struct OracleReport {
  std::string check;
  bool passed = true;
  std::vector<std::pair<std::string, double>> stats;

  void record(std::string key, double value) { stats.emplace_back(std::move(key), value); }
};

/// Minimum of (1/n) sum (v_i - y_i)^2 over nondecreasing y with entries in
/// [0,1], by enumerating every split of the index range into consecutive
/// blocks and, per block, every active set: free (value = block mean) or pinned
/// at 0 or at 1. The optimum is constant on blocks with each level either the
/// block mean or a bound, so it is one of the enumerated candidates.
inline double bounded_isotonic_bruteforce(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0 || n > 16) throw std::invalid_argument("bounded_isotonic_bruteforce: need 1 <= n <= 16");
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::vector<double> level;
  for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    blocks.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (cuts & (1u << i)) {
        blocks.emplace_back(start, i + 1);
        start = i + 1;
      }
    blocks.emplace_back(start, n);
    const std::size_t k = blocks.size();
    std::size_t combos = 1;
    for (std::size_t b = 0; b < k; ++b) combos *= 3;
    level.resize(k);
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t code = c;
      bool ok = true;
      for (std::size_t b = 0; b < k && ok; ++b) {
        const int state = static_cast<int>(code % 3);
        code /= 3;
        if (state == 0) {
          double s = 0.0;
          for (std::size_t i = blocks[b].first; i < blocks[b].second; ++i) s += v[i];
          level[b] = s / static_cast<double>(blocks[b].second - blocks[b].first);
          ok = level[b] >= 0.0 && level[b] <= 1.0;
        } else {
          level[b] = state == 1 ? 0.0 : 1.0;
        }
        if (ok && b > 0) ok = level[b] >= level[b - 1];
      }
      if (!ok) continue;
      double obj = 0.0;
      for (std::size_t b = 0; b < k; ++b)
        for (std::size_t i = blocks[b].first; i < blocks[b].second; ++i)
          obj += (v[i] - level[b]) * (v[i] - level[b]);
      best = std::min(best, obj / static_cast<double>(n));
    }
  }
  return best;
}

/// Empirical P(j > k), k = 2..4, over iid uniform p-values against the closed
/// form; passes when every |z| <= 3.
inline OracleReport oracle_j_law(std::vector<std::size_t> sizes = {100, 1000},
                                 std::size_t replications = 10000, std::uint64_t seed = 20240101) {
  OracleReport rep{"j_law", true, {}};
  const GaussianMixtureSpec null{1.0, 2.0, 1.0};
  for (std::size_t n : sizes) {
    std::vector<std::size_t> exceed(5, 0);
    for (std::size_t r = 0; r < replications; ++r) {
      const auto s = generate_sample(n, DependenceSpec::iid(), null, seed + r);
      const auto j = bh_estimate(s.pvalues).j.value_or(n + 1);
      for (std::size_t k = 2; k <= 4; ++k)
        if (j > k) ++exceed[k];
    }
    for (std::size_t k = 2; k <= 4; ++k) {
      const double exact = j_tail_probability(n, k);
      const double emp = static_cast<double>(exceed[k]) / static_cast<double>(replications);
      const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(replications));
      const double z = (emp - exact) / se;
      const std::string tag = "n=" + std::to_string(n) + ",k=" + std::to_string(k);
      rep.record(tag + ",empirical", emp);
      rep.record(tag + ",exact", exact);
      rep.record(tag + ",z", z);
      if (!(std::abs(z) <= 3.0)) rep.passed = false;
    }
  }
  return rep;
}

/// Storey's pi0(lambda) on one large iid sample against its almost-sure limit.
inline OracleReport oracle_storey_limit(std::size_t n = 1000000, std::uint64_t seed = 7,
                                        double tolerance = 0.01) {
  OracleReport rep{"storey_limit", true, {}};
  double worst = 0.0;
  for (double pi0 : {0.5, 0.9}) {
    const GaussianMixtureSpec mix{pi0, 2.0, 1.0};
    const auto s = generate_sample(n, DependenceSpec::iid(), mix, seed);
    for (double lambda : {0.2, 0.5, 0.8}) {
      const double gap = std::abs(storey_at(s.pvalues, lambda) - storey_asymptotic_limit(lambda, mix));
      rep.record("pi0=" + std::to_string(pi0).substr(0, 3) + ",lambda=" + std::to_string(lambda).substr(0, 3) +
                     ",gap",
                 gap);
      worst = std::max(worst, gap);
    }
  }
  rep.record("max_gap", worst);
  rep.passed = worst < tolerance;
  return rep;
}

/// PAVA-plus-clamp against the exhaustive minimiser, and exact idempotence.
inline OracleReport oracle_pava_bruteforce(std::size_t count = 500, std::size_t max_len = 8,
                                           std::uint64_t seed = 11) {
  OracleReport rep{"pava_bruteforce", true, {}};
  Engine rng = make_engine(seed, Stream::statistics);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_real_distribution<double> val(-0.5, 1.5);
  double worst_gap = 0.0;
  std::size_t not_idempotent = 0;
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = val(rng);
    const auto proj = project_to_cdf(v);
    double obj = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) obj += (v[i] - proj[i]) * (v[i] - proj[i]);
    obj /= static_cast<double>(v.size());
    worst_gap = std::max(worst_gap, std::abs(obj - bounded_isotonic_bruteforce(v)));
    if (project_to_cdf(proj) != proj) ++not_idempotent;
  }
  rep.record("inputs", static_cast<double>(count));
  rep.record("max_objective_gap", worst_gap);
  rep.record("idempotence_failures", static_cast<double>(not_idempotent));
  rep.passed = worst_gap < 1e-9 && not_idempotent == 0;
  return rep;
}

/// gamma d_n(F1_hat, F2_hat) against d_n(F_n, gamma F2_hat + (1 - gamma) F0)
/// over the full gamma grid for random mixture samples.
inline OracleReport oracle_curve_identity(std::size_t samples = 20, std::size_t n = 1000,
                                          double gamma_step = 0.001, std::uint64_t seed = 13) {
  OracleReport rep{"curve_identity", true, {}};
  const auto gammas = gamma_grid(gamma_step);
  double worst = 0.0;
  std::vector<double> mixed(n);
  for (std::size_t t = 0; t < samples; ++t) {
    const double pi0 = 0.5 + 0.5 * static_cast<double>(t) / static_cast<double>(samples);
    const auto s = generate_sample(n, DependenceSpec::iid(), {pi0, 2.0, 1.0}, seed + t);
    ProjectionCurve curve(s.pvalues, UniformCdf{});
    const auto fn = curve.ecdf();
    const auto f0 = curve.null_cdf();
    for (double g : gammas) {
      const double lhs = curve.distance(g);
      const auto f2 = curve.projection(g);
      for (std::size_t i = 0; i < n; ++i) mixed[i] = g * f2[i] + (1.0 - g) * f0[i];
      worst = std::max(worst, std::abs(lhs - dn_distance(fn, mixed)));
    }
  }
  rep.record("samples", static_cast<double>(samples));
  rep.record("gammas", static_cast<double>(gammas.size()));
  rep.record("max_abs_difference", worst);
  rep.passed = worst < 1e-10;
  return rep;
}

inline const std::vector<std::string>& oracle_names() {
  static const std::vector<std::string> names{"j_law", "storey_limit", "pava_bruteforce", "curve_identity"};
  return names;
}

inline OracleReport run_oracle(const std::string& name) {
  if (name == "j_law") return oracle_j_law();
  if (name == "storey_limit") return oracle_storey_limit();
  if (name == "pava_bruteforce") return oracle_pava_bruteforce();
  if (name == "curve_identity") return oracle_curve_identity();
  throw std::invalid_argument("unknown oracle check '" + name + "'");
}

}  // namespace pinull

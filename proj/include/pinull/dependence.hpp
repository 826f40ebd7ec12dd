#pragma once

// Seeded dependent N(0,1) statistic sequences, planted alternatives and the
// conversion to one-sided p-values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pinull/normal.hpp"
#include "pinull/rng.hpp"

namespace pinull {

namespace dependence {

struct Iid {};

/// Stationary AR(1) with unit marginal variance.
struct Ar1 {
  double a = 0.0;
};

/// X_i = (xi_i + ... + xi_{i+m}) / sqrt(m+1).
struct MovingAverageEqual {
  int m = 1;
};

/// X_i proportional to sum_k (m+1-k) xi_{i+k}, k = 0..m, scaled to unit variance.
struct MovingAverageTriangular {
  int m = 1;
};

/// Independent equicorrelated blocks. correlations are assigned to blocks cyclically.
struct Block {
  std::vector<std::size_t> sizes;
  std::vector<double> correlations;
};

}  // namespace dependence

class DependenceSpec {
public:
  using Kind = std::variant<dependence::Iid, dependence::Ar1, dependence::MovingAverageEqual,
                            dependence::MovingAverageTriangular, dependence::Block>;

  DependenceSpec() = default;
  explicit DependenceSpec(Kind kind) : kind_(std::move(kind)) {}

  static DependenceSpec iid() { return DependenceSpec(dependence::Iid{}); }
  static DependenceSpec ar1(double a) { return DependenceSpec(dependence::Ar1{a}); }
  static DependenceSpec mdep_equal(int m) {
    return DependenceSpec(dependence::MovingAverageEqual{m});
  }
  static DependenceSpec mdep_triangular(int m) {
    return DependenceSpec(dependence::MovingAverageTriangular{m});
  }
  static DependenceSpec block(std::vector<std::size_t> sizes, std::vector<double> correlations) {
    return DependenceSpec(dependence::Block{std::move(sizes), std::move(correlations)});
  }
  /// `count` blocks of `size` observations each.
  static DependenceSpec equal_blocks(std::size_t count, std::size_t size,
                                     std::vector<double> correlations) {
    return block(std::vector<std::size_t>(count, size), std::move(correlations));
  }

  const Kind& kind() const { return kind_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(kind_);
  }

  void validate() const {
    std::visit(
        [](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dependence::Ar1>) {
            if (!(std::abs(k.a) < 1.0))
              throw std::invalid_argument("DependenceSpec: AR(1) coefficient must satisfy |a| < 1");
          } else if constexpr (std::is_same_v<T, dependence::MovingAverageEqual> ||
                               std::is_same_v<T, dependence::MovingAverageTriangular>) {
            if (k.m < 1) throw std::invalid_argument("DependenceSpec: m must be >= 1");
          } else if constexpr (std::is_same_v<T, dependence::Block>) {
            if (k.sizes.empty()) throw std::invalid_argument("DependenceSpec: no blocks");
            if (k.correlations.empty())
              throw std::invalid_argument("DependenceSpec: no block correlations");
            for (auto s : k.sizes)
              if (s == 0) throw std::invalid_argument("DependenceSpec: block size must be >= 1");
            for (double r : k.correlations)
              if (!(r >= 0.0 && r < 1.0))
                throw std::invalid_argument("DependenceSpec: block correlation must lie in [0,1)");
          }
        },
        kind_);
  }

  /// Short description, e.g. "ar1(a=0.1)".
  std::string describe() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dependence::Iid>) {
            return "iid";
          } else if constexpr (std::is_same_v<T, dependence::Ar1>) {
            return "ar1(a=" + trim_number(k.a) + ")";
          } else if constexpr (std::is_same_v<T, dependence::MovingAverageEqual>) {
            return "mdep_equal(m=" + std::to_string(k.m) + ")";
          } else if constexpr (std::is_same_v<T, dependence::MovingAverageTriangular>) {
            return "mdep_triangular(m=" + std::to_string(k.m) + ")";
          } else {
            return "block(count=" + std::to_string(k.sizes.size()) + ")";
          }
        },
        kind_);
  }

private:
  static std::string trim_number(double v) {
    std::string s = std::to_string(v);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  Kind kind_ = dependence::Iid{};
};

namespace detail {

inline std::vector<double> moving_average(std::size_t n, std::span<const double> weights,
                                          Engine& rng) {
  std::normal_distribution<double> normal;
  const std::size_t width = weights.size();
  std::vector<double> xi(n + width - 1);
  for (auto& v : xi) v = normal(rng);
  double norm2 = 0.0;
  for (double w : weights) norm2 += w * w;
  const double scale = 1.0 / std::sqrt(norm2);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < width; ++k) s += weights[k] * xi[i + k];
    out[i] = s * scale;
  }
  return out;
}

}  // namespace detail

/// n statistics with N(0,1) marginals and the joint law described by `spec`.
inline std::vector<double> generate_statistics(std::size_t n, const DependenceSpec& spec,
                                               std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_statistics: n must be >= 1");
  spec.validate();
  Engine rng = make_engine(seed, Stream::statistics);
  std::normal_distribution<double> normal;

  return std::visit(
      [&](const auto& k) -> std::vector<double> {
        using T = std::decay_t<decltype(k)>;
        std::vector<double> x(n);
        if constexpr (std::is_same_v<T, dependence::Iid>) {
          for (auto& v : x) v = normal(rng);
        } else if constexpr (std::is_same_v<T, dependence::Ar1>) {
          const double innovation_sd = std::sqrt(1.0 - k.a * k.a);
          x[0] = normal(rng);
          for (std::size_t i = 1; i < n; ++i) x[i] = k.a * x[i - 1] + innovation_sd * normal(rng);
        } else if constexpr (std::is_same_v<T, dependence::MovingAverageEqual>) {
          std::vector<double> w(static_cast<std::size_t>(k.m) + 1, 1.0);
          x = detail::moving_average(n, w, rng);
        } else if constexpr (std::is_same_v<T, dependence::MovingAverageTriangular>) {
          std::vector<double> w(static_cast<std::size_t>(k.m) + 1);
          for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(k.m + 1) - j;
          x = detail::moving_average(n, w, rng);
        } else {
          const std::size_t total = std::accumulate(k.sizes.begin(), k.sizes.end(), std::size_t{0});
          if (total != n)
            throw std::invalid_argument("generate_statistics: block sizes sum to " +
                                        std::to_string(total) + ", expected n = " +
                                        std::to_string(n));
          std::size_t pos = 0;
          for (std::size_t b = 0; b < k.sizes.size(); ++b) {
            const double rho = k.correlations[b % k.correlations.size()];
            const double shared = std::sqrt(rho) * normal(rng);
            const double own = std::sqrt(1.0 - rho);
            for (std::size_t i = 0; i < k.sizes[b]; ++i) x[pos++] = shared + own * normal(rng);
          }
        }
        return x;
      },
      spec.kind());
}

/// round(n * (1 - pi0)), half away from zero.
inline std::size_t nonnull_count(std::size_t n, double pi0) {
  return static_cast<std::size_t>(std::lround(static_cast<double>(n) * (1.0 - pi0)));
}

struct PlantedStatistics {
  std::vector<double> statistics;
  std::vector<std::size_t> nonnull_indices;  // ascending
};

/// Shifts round(n(1-pi0)) uniformly chosen entries by mu_alt.
inline PlantedStatistics plant_alternatives(std::vector<double> stats, double pi0, double mu_alt,
                                            std::uint64_t seed) {
  if (!(pi0 >= 0.0 && pi0 <= 1.0))
    throw std::invalid_argument("plant_alternatives: pi0 must lie in [0,1]");
  const std::size_t n = stats.size();
  const std::size_t k = std::min(nonnull_count(n, pi0), n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  Engine rng = make_engine(seed, Stream::placement);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), k, rng);
  for (auto i : chosen) stats[i] += mu_alt;
  return {std::move(stats), std::move(chosen)};
}

inline constexpr double kPValueFloor = 1e-300;

/// p_i = 1 - Phi(X_i), kept strictly inside (0,1).
inline std::vector<double> to_pvalues(std::span<const double> stats) {
  const double ceiling = std::nextafter(1.0, 0.0);
  std::vector<double> p(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (!std::isfinite(stats[i])) throw std::invalid_argument("to_pvalues: non-finite statistic");
    p[i] = std::clamp(std_normal_cdf(-stats[i]), kPValueFloor, ceiling);
  }
  return p;
}

struct PValueSample {
  std::vector<double> pvalues;
  std::vector<std::size_t> nonnull_indices;
  std::uint64_t seed = 0;
  DependenceSpec spec;
  GaussianMixtureSpec mixture;
};

/// generate -> plant -> convert, all streams derived from `seed`.
inline PValueSample generate_sample(std::size_t n, const DependenceSpec& spec,
                                    const GaussianMixtureSpec& mixture, std::uint64_t seed) {
  mixture.validate();
  if (mixture.sigma != 1.0)
    throw std::invalid_argument("generate_sample: only unit-variance alternatives are generated");
  auto planted =
      plant_alternatives(generate_statistics(n, spec, seed), mixture.pi0, mixture.mu_alt, seed);
  return {to_pvalues(planted.statistics), std::move(planted.nonnull_indices), seed, spec, mixture};
}

}  // namespace pinull

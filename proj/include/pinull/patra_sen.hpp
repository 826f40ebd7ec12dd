#pragma once

// Null-proportion estimation by isotonic projection.
//
// For a candidate non-null mass gamma the naive estimate of the alternative
// cdf at the order statistics is
//     F1_hat(gamma) = (F_n - (1 - gamma) F0) / gamma,
// which need not be a cdf. Its L2(F_n) projection onto cdfs, F2_hat(gamma), is
// the equal-weight isotonic regression clamped to [0,1]. The curve
// gamma * d_n(F1_hat, F2_hat) vanishes at gamma = 1 and stays small above the
// identifiable non-null mass; pi1_hat is the first grid gamma whose curve value
// drops below c_n / sqrt(n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinull/ecdf.hpp"
#include "pinull/estimate.hpp"
#include "pinull/rng.hpp"

namespace pinull {

/// F0 for p-values.
struct UniformCdf {
  double operator()(double x) const { return std::clamp(x, 0.0, 1.0); }
};

/// Equal-weight pool-adjacent-violators; `out` may alias `in`.
class IsotonicRegression {
public:
  void fit(std::span<const double> in, std::span<double> out) {
    if (in.size() != out.size()) throw std::invalid_argument("IsotonicRegression: size mismatch");
    blocks_.clear();
    for (double v : in) {
      blocks_.push_back({v, 1});
      while (blocks_.size() > 1) {
        const Block& b = blocks_.back();
        const Block& a = blocks_[blocks_.size() - 2];
        // mean(a) > mean(b), compared without division
        if (!(a.sum * static_cast<double>(b.count) > b.sum * static_cast<double>(a.count))) break;
        Block merged{a.sum + b.sum, a.count + b.count};
        blocks_.pop_back();
        blocks_.back() = merged;
      }
    }
    std::size_t pos = 0;
    for (const Block& b : blocks_) {
      const double mean = b.count == 1 ? b.sum : b.sum / static_cast<double>(b.count);
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(pos), b.count, mean);
      pos += b.count;
    }
  }

private:
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks_;
};

/// (F_n - (1 - gamma) F0) / gamma, pointwise.
inline std::vector<double> naive_f1(std::span<const double> ecdf_vals, std::span<const double> f0_vals,
                                    double gamma) {
  if (ecdf_vals.size() != f0_vals.size()) throw std::invalid_argument("naive_f1: length mismatch");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("naive_f1: gamma must lie in (0,1]");
  std::vector<double> out(ecdf_vals.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (ecdf_vals[i] - (1.0 - gamma) * f0_vals[i]) / gamma;
  return out;
}

/// Least-squares projection onto nondecreasing sequences with values in [0,1].
inline std::vector<double> project_to_cdf(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("project_to_cdf: empty input");
  std::vector<double> out(values.size());
  IsotonicRegression iso;
  iso.fit(values, out);
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

struct GammaDistanceCurve {
  std::vector<double> gammas;
  std::vector<double> distances;  // gamma * d_n(F1_hat(gamma), F2_hat(gamma))
};

/// Evaluates the naive estimate, its projection and the curve value for one
/// sample at any gamma. Holds scratch buffers, so not shareable across threads.
class ProjectionCurve {
public:
  template <class Cdf>
  ProjectionCurve(std::span<const double> pvalues, Cdf&& f0) {
    if (pvalues.empty()) throw std::invalid_argument("ProjectionCurve: empty sample");
    x_.assign(pvalues.begin(), pvalues.end());
    std::sort(x_.begin(), x_.end());
    init(f0);
  }

  std::span<const double> sample() const { return x_; }
  std::span<const double> ecdf() const { return fn_; }
  std::span<const double> null_cdf() const { return f0_; }
  std::size_t size() const { return x_.size(); }

  /// gamma * d_n(F1_hat, F2_hat)
  double distance(double gamma) {
    compute(gamma);
    double s = 0.0;
    for (std::size_t i = 0; i < naive_.size(); ++i) {
      const double d = naive_[i] - projected_[i];
      s += d * d;
    }
    return gamma * std::sqrt(s / static_cast<double>(naive_.size()));
  }

  /// F2_hat(gamma) at the order statistics.
  std::vector<double> projection(double gamma) {
    compute(gamma);
    return projected_;
  }

  std::vector<double> naive(double gamma) {
    compute(gamma);
    return naive_;
  }

private:
  template <class Cdf>
  void init(Cdf&& f0) {
    fn_ = ecdf_at_sample(SortedSample(x_));
    f0_.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) f0_[i] = f0(x_[i]);
    naive_.resize(x_.size());
    projected_.resize(x_.size());
  }

  void compute(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw std::invalid_argument("ProjectionCurve: gamma must lie in (0,1]");
    const double w0 = 1.0 - gamma;
    for (std::size_t i = 0; i < x_.size(); ++i) naive_[i] = (fn_[i] - w0 * f0_[i]) / gamma;
    iso_.fit(naive_, projected_);
    for (auto& v : projected_) v = std::clamp(v, 0.0, 1.0);
  }

  std::vector<double> x_, fn_, f0_, naive_, projected_;
  IsotonicRegression iso_;
};

/// {step, 2 step, ..., 1}; the last point is exactly 1.
inline std::vector<double> gamma_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("gamma_grid: step must lie in (0,1]");
  const double ratio = 1.0 / step;
  const double nearest = std::round(ratio);
  const auto count = static_cast<std::size_t>(std::abs(ratio - nearest) < 1e-9 ? nearest : std::ceil(ratio));
  std::vector<double> g(count);
  for (std::size_t k = 0; k + 1 < count; ++k) g[k] = static_cast<double>(k + 1) * step;
  g.back() = 1.0;
  return g;
}

template <class Cdf>
GammaDistanceCurve gamma_distance_curve(std::span<const double> pvalues, Cdf&& f0,
                                        std::span<const double> gammas) {
  if (gammas.empty()) throw std::invalid_argument("gamma_distance_curve: empty gamma grid");
  ProjectionCurve curve(pvalues, f0);
  GammaDistanceCurve out{std::vector<double>(gammas.begin(), gammas.end()), {}};
  out.distances.reserve(gammas.size());
  for (double g : gammas) out.distances.push_back(curve.distance(g));
  return out;
}

enum class CnMethod { fixed, cross_validated };

inline const char* to_string(CnMethod m) {
  return m == CnMethod::fixed ? "fixed" : "cross_validated";
}

struct PatraSenEstimate {
  double pi1_hat = 0.0;
  double c_n = 0.0;
  /// Curve over the scanned prefix of the gamma grid, ending at pi1_hat.
  GammaDistanceCurve curve;
  CnMethod method = CnMethod::fixed;

  double pi0_hat() const { return std::clamp(1.0 - pi1_hat, 0.0, 1.0); }

  EstimateResult to_result() const {
    return {method == CnMethod::fixed ? "patra_sen_fixed" : "patra_sen_cv",
            pi0_hat(),
            {{"pi1_hat", pi1_hat}, {"c_n", c_n}}};
  }
};

/// c_n = 0.1 log(log n)
inline double cn_fixed(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cn_fixed: n must be >= 3");
  return 0.1 * std::log(std::log(static_cast<double>(n)));
}

namespace detail {

inline void check_gamma_step(double step) {
  if (!(step > 0.0 && step <= 0.01))
    throw std::invalid_argument("patra-sen: gamma_step must lie in (0, 0.01]");
}

// Scans gammas in increasing order and stops at the first curve value <= threshold.
inline std::size_t scan_to_threshold(ProjectionCurve& curve, std::span<const double> gammas,
                                     double threshold, GammaDistanceCurve* record) {
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const double d = curve.distance(gammas[k]);
    if (record) {
      record->gammas.push_back(gammas[k]);
      record->distances.push_back(d);
    }
    if (d <= threshold) return k;
  }
  return gammas.size() - 1;  // unreachable in exact arithmetic: the curve is 0 at gamma = 1
}

}  // namespace detail

/// pi1_hat = inf{gamma on the grid : gamma d_n(F1_hat, F2_hat) <= c_n / sqrt(n)}.
template <class Cdf>
PatraSenEstimate estimate_pi1(std::span<const double> pvalues, Cdf&& f0, double c_n,
                              double gamma_step = 0.001) {
  if (!(c_n > 0.0)) throw std::invalid_argument("estimate_pi1: c_n must be > 0");
  detail::check_gamma_step(gamma_step);
  ProjectionCurve curve(pvalues, f0);
  const auto gammas = gamma_grid(gamma_step);
  const double threshold = c_n / std::sqrt(static_cast<double>(curve.size()));
  PatraSenEstimate est;
  est.c_n = c_n;
  const std::size_t k = detail::scan_to_threshold(curve, gammas, threshold, &est.curve);
  est.pi1_hat = gammas[k];
  return est;
}

/// Chooses c among `candidates` by `folds`-fold cross-validation. For each
/// candidate and fold the training part gives pi1_hat and the fitted mixture
/// G = pi1_hat F2_hat + (1 - pi1_hat) F0; the held-out part scores it by the
/// L2(held-out ECDF) distance between G and the held-out ECDF. The threshold on
/// a training set of size m is c / sqrt(m). Lowest mean score wins, ties to the
/// smallest c.
template <class Cdf>
double cn_cross_validated(std::span<const double> pvalues, Cdf&& f0, std::span<const double> candidates,
                          std::size_t folds, std::uint64_t seed, double gamma_step = 0.001) {
  if (candidates.empty()) throw std::invalid_argument("cn_cross_validated: no candidates");
  if (folds < 2) throw std::invalid_argument("cn_cross_validated: folds must be >= 2");
  for (double c : candidates)
    if (!(c > 0.0)) throw std::invalid_argument("cn_cross_validated: candidates must be > 0");
  detail::check_gamma_step(gamma_step);
  const std::size_t n = pvalues.size();
  if (n / folds < 2) throw std::invalid_argument("cn_cross_validated: fold size must be >= 2");
  if (candidates.size() == 1) return candidates[0];

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Engine rng = make_engine(seed, Stream::folds);
  std::shuffle(perm.begin(), perm.end(), rng);

  const auto gammas = gamma_grid(gamma_step);
  const double c_min = *std::min_element(candidates.begin(), candidates.end());
  std::vector<double> score(candidates.size(), 0.0);
  std::vector<bool> in_fold(n);

  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * n / folds, hi = (f + 1) * n / folds;
    std::fill(in_fold.begin(), in_fold.end(), false);
    for (std::size_t i = lo; i < hi; ++i) in_fold[perm[i]] = true;
    std::vector<double> train, held;
    train.reserve(n - (hi - lo));
    held.reserve(hi - lo);
    for (std::size_t i = 0; i < n; ++i) (in_fold[i] ? held : train).push_back(pvalues[i]);
    std::sort(held.begin(), held.end());
    const auto held_ecdf = ecdf_at_sample(SortedSample(held));

    ProjectionCurve curve(train, f0);
    const double root_m = std::sqrt(static_cast<double>(train.size()));
    GammaDistanceCurve prefix;
    detail::scan_to_threshold(curve, gammas, c_min / root_m, &prefix);

    std::vector<double> fitted(held.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double threshold = candidates[c] / root_m;
      std::size_t k = 0;
      while (k + 1 < prefix.distances.size() && prefix.distances[k] > threshold) ++k;
      const double pi1 = prefix.gammas[k];
      const auto f2 = curve.projection(pi1);
      const auto xs = curve.sample();
      for (std::size_t i = 0; i < held.size(); ++i) {
        const auto pos = std::upper_bound(xs.begin(), xs.end(), held[i]) - xs.begin();
        const double step = pos == 0 ? 0.0 : f2[static_cast<std::size_t>(pos - 1)];
        fitted[i] = pi1 * step + (1.0 - pi1) * f0(held[i]);
      }
      score[c] += dn_distance(fitted, held_ecdf);
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c)
    if (score[c] < score[best] || (score[c] == score[best] && candidates[c] < candidates[best]))
      best = c;
  return candidates[best];
}

/// Cross-validated c followed by the full-sample estimate.
template <class Cdf>
PatraSenEstimate estimate_pi1_cv(std::span<const double> pvalues, Cdf&& f0,
                                 std::span<const double> candidates, std::size_t folds,
                                 std::uint64_t seed, double gamma_step = 0.001) {
  const double c = cn_cross_validated(pvalues, f0, candidates, folds, seed, gamma_step);
  auto est = estimate_pi1(pvalues, f0, c, gamma_step);
  est.method = CnMethod::cross_validated;
  return est;
}

}  // namespace pinull

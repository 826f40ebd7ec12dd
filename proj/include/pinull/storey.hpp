#pragma once

// Storey's lambda estimator pi0(lambda) = #{p > lambda} / (n (1 - lambda)),
// with the spline-smoother and bootstrap-MSE choices of lambda.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinull/estimate.hpp"
#include "pinull/normal.hpp"
#include "pinull/rng.hpp"
#include "pinull/smoothing_spline.hpp"

namespace pinull {

class LambdaGrid {
public:
  explicit LambdaGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("LambdaGrid: empty grid");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0 && values_[i] < 1.0))
        throw std::invalid_argument("LambdaGrid: values must lie in [0,1)");
      if (i > 0 && !(values_[i] > values_[i - 1]))
        throw std::invalid_argument("LambdaGrid: values must be strictly increasing");
    }
  }

  /// {0, 0.01, ..., 0.95}
  static LambdaGrid standard() {
    std::vector<double> v(96);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) / 100.0;
    return LambdaGrid(std::move(v));
  }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

private:
  std::vector<double> values_;
};

inline double storey_at(std::span<const double> pvalues, double lambda) {
  if (pvalues.empty()) throw std::invalid_argument("storey_at: empty input");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("storey_at: lambda must lie in [0,1)");
  const auto above = std::count_if(pvalues.begin(), pvalues.end(), [&](double p) { return p > lambda; });
  return static_cast<double>(above) / (static_cast<double>(pvalues.size()) * (1.0 - lambda));
}

struct StoreyCurve {
  LambdaGrid lambdas;
  std::vector<double> estimates;
};

namespace detail {

// bin[i] = #{k : lambda_k < p_i}, so p_i > lambda_k  <=>  bin[i] > k.
inline std::vector<std::size_t> lambda_bins(std::span<const double> pvalues, const LambdaGrid& grid) {
  const auto lam = grid.values();
  std::vector<std::size_t> bins(pvalues.size());
  for (std::size_t i = 0; i < pvalues.size(); ++i)
    bins[i] = static_cast<std::size_t>(std::lower_bound(lam.begin(), lam.end(), pvalues[i]) - lam.begin());
  return bins;
}

// pi0(lambda_k) from a histogram over bins 0..K.
inline void curve_from_histogram(std::span<const std::size_t> hist, const LambdaGrid& grid,
                                 double n, std::span<double> out) {
  const std::size_t K = grid.size();
  std::size_t above = 0;  // #{bin > k}
  for (std::size_t k = K; k-- > 0;) {
    above += hist[k + 1];
    out[k] = static_cast<double>(above) / (n * (1.0 - grid[k]));
  }
}

}  // namespace detail

inline StoreyCurve storey_curve(std::span<const double> pvalues, const LambdaGrid& grid) {
  if (pvalues.empty()) throw std::invalid_argument("storey_curve: empty input");
  std::vector<std::size_t> hist(grid.size() + 1, 0);
  for (auto b : detail::lambda_bins(pvalues, grid)) ++hist[b];
  std::vector<double> est(grid.size());
  detail::curve_from_histogram(hist, grid, static_cast<double>(pvalues.size()), est);
  return {grid, std::move(est)};
}

/// Fits a df = 3 natural cubic smoothing spline to (lambda, pi0(lambda)) and
/// reports min{f(1), 1}, clamped at 0. The spline setup depends only on the
/// grid, so keep one instance per grid when estimating repeatedly.
class StoreySmoother {
public:
  static constexpr double kDegreesOfFreedom = 3.0;

  explicit StoreySmoother(LambdaGrid grid)
      : grid_(std::move(grid)), spline_(make_spline(grid_)) {}

  const LambdaGrid& grid() const { return grid_; }
  const CubicSmoothingSpline& spline() const { return spline_; }

  EstimateResult operator()(std::span<const double> pvalues) const {
    return from_curve(storey_curve(pvalues, grid_).estimates);
  }

  /// Smooths pi0(lambda) values already tabulated on the grid.
  EstimateResult from_curve(std::span<const double> estimates) const {
    const auto fit = spline_.fit(estimates);
    const double at_one = spline_.evaluate(fit, 1.0);
    return {"storey_smoother", std::clamp(at_one, 0.0, 1.0), {{"f_hat_1", at_one}}};
  }

private:
  static CubicSmoothingSpline make_spline(const LambdaGrid& grid) {
    if (grid.size() < 4)
      throw std::invalid_argument("storey_smoother: need at least 4 distinct lambda values");
    const auto v = grid.values();
    return CubicSmoothingSpline(std::vector<double>(v.begin(), v.end()), kDegreesOfFreedom);
  }

  LambdaGrid grid_;
  CubicSmoothingSpline spline_;
};

inline EstimateResult storey_smoother(std::span<const double> pvalues, const LambdaGrid& grid) {
  return StoreySmoother(grid)(pvalues);
}

/// Default resampler: B iid-with-replacement index draws, replicate b on its own substream.
class IidResampler {
public:
  explicit IidResampler(std::uint64_t seed) : seed_(seed) {}

  void operator()(std::size_t n, std::size_t b, std::vector<std::size_t>& out) const {
    Engine rng = make_engine(seed_, Stream::bootstrap, b);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    out.resize(n);
    for (auto& i : out) i = pick(rng);
  }

private:
  std::uint64_t seed_;
};

/// Bootstrap-MSE choice of lambda against the plug-in target min_lambda pi0(lambda).
/// `resample(n, b, indices)` fills the b-th resample's indices. Ties in the MSE
/// go to the smallest lambda.
template <class Resampler>
  requires std::invocable<Resampler&, std::size_t, std::size_t, std::vector<std::size_t>&>
EstimateResult storey_bootstrap(std::span<const double> pvalues, const LambdaGrid& grid,
                                std::size_t B, Resampler&& resample) {
  if (B < 1) throw std::invalid_argument("storey_bootstrap: B must be >= 1");
  if (pvalues.empty()) throw std::invalid_argument("storey_bootstrap: empty input");
  const std::size_t n = pvalues.size();
  const std::size_t K = grid.size();
  const auto bins = detail::lambda_bins(pvalues, grid);

  std::vector<std::size_t> hist(K + 1, 0);
  for (auto b : bins) ++hist[b];
  std::vector<double> original(K);
  detail::curve_from_histogram(hist, grid, static_cast<double>(n), original);
  const double target = *std::min_element(original.begin(), original.end());

  std::vector<double> mse(K, 0.0), boot(K);
  std::vector<std::size_t> idx;
  for (std::size_t b = 0; b < B; ++b) {
    resample(n, b, idx);
    std::fill(hist.begin(), hist.end(), 0);
    for (auto i : idx) ++hist[bins[i]];
    detail::curve_from_histogram(hist, grid, static_cast<double>(n), boot);
    for (std::size_t k = 0; k < K; ++k) {
      const double d = boot[k] - target;
      mse[k] += d * d;
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < K; ++k)
    if (mse[k] < mse[best]) best = k;

  return {"storey_bootstrap",
          std::min(1.0, original[best]),
          {{"lambda_star", grid[best]},
           {"mse", mse[best] / static_cast<double>(B)},
           {"plug_in", target}}};
}

inline EstimateResult storey_bootstrap(std::span<const double> pvalues, const LambdaGrid& grid,
                                       std::size_t B, std::uint64_t seed) {
  return storey_bootstrap(pvalues, grid, B, IidResampler(seed));
}

/// Almost-sure limit pi0 + pi1 (1 - F1(lambda)) / (1 - lambda) for independent p-values.
inline double storey_asymptotic_limit(double lambda, const GaussianMixtureSpec& spec) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("storey_asymptotic_limit: lambda must lie in [0,1)");
  return spec.pi0 + spec.pi1() * (1.0 - alt_pvalue_cdf(lambda, spec)) / (1.0 - lambda);
}

}  // namespace pinull

#pragma once

// Gaussian kernels for the one-sided mean test: Phi, Phi^-1, the alternative
// p-value law F1 and its density ratio against the uniform null.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

namespace pinull {

/// Two-component Gaussian mixture for the test statistic: N(0,1) with
/// probability pi0, N(mu_alt, sigma^2) otherwise.
struct GaussianMixtureSpec {
  double pi0 = 1.0;
  double mu_alt = 2.0;
  double sigma = 1.0;

  double pi1() const { return 1.0 - pi0; }

  void validate() const {
    if (!(pi0 >= 0.0 && pi0 <= 1.0))
      throw std::invalid_argument("GaussianMixtureSpec: pi0 must lie in [0,1]");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("GaussianMixtureSpec: sigma must be > 0");
    if (!std::isfinite(mu_alt))
      throw std::invalid_argument("GaussianMixtureSpec: mu_alt must be finite");
  }
};

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * (1.0 / std::numbers::sqrt2));
}

inline double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("std_normal_quantile: u must lie in (0,1)");
  // Phi^-1(u) = -sqrt(2) * erfc^-1(2u); erfc_inv is accurate in both tails.
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

/// Distribution function of the p-value 1 - Phi(X) when X ~ N(mu_alt, sigma^2).
inline double alt_pvalue_cdf(double t, const GaussianMixtureSpec& spec) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("alt_pvalue_cdf: t must lie in [0,1]");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  // 1 - Phi(z - mu) with z = Phi^-1(1-t) = -Phi^-1(t)
  const double z = -std_normal_quantile(t);
  return std_normal_cdf((spec.mu_alt - z) / spec.sigma);
}

/// f1/f0 for the p-value densities; unit variance only.
inline double pvalue_density_ratio(double t, const GaussianMixtureSpec& spec) {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("pvalue_density_ratio: t must lie in (0,1)");
  if (spec.sigma != 1.0)
    throw std::invalid_argument("pvalue_density_ratio: only sigma = 1 is supported");
  const double z = -std_normal_quantile(t);
  return std::exp(spec.mu_alt * z - 0.5 * spec.mu_alt * spec.mu_alt);
}

/// Density ratio f1/f0 tabulated on a grid of interior points.
class DensityRatioGrid {
public:
  DensityRatioGrid(std::vector<double> points, std::vector<double> ratios)
      : points_(std::move(points)), ratios_(std::move(ratios)) {
    if (points_.size() != ratios_.size())
      throw std::invalid_argument("DensityRatioGrid: points and ratios differ in length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!(points_[i] > 0.0 && points_[i] < 1.0))
        throw std::invalid_argument("DensityRatioGrid: points must lie in (0,1)");
      if (i > 0 && !(points_[i] > points_[i - 1]))
        throw std::invalid_argument("DensityRatioGrid: points must be strictly increasing");
      if (!(ratios_[i] >= 0.0) || !std::isfinite(ratios_[i]))
        throw std::invalid_argument("DensityRatioGrid: ratios must be finite and non-negative");
    }
  }

  /// Equispaced grid on (eps, 1-eps) with ratios from the Gaussian closed form.
  static DensityRatioGrid gaussian(const GaussianMixtureSpec& spec, std::size_t count = 10000,
                                   double eps = 1e-6) {
    if (count < 1) throw std::invalid_argument("DensityRatioGrid: count must be >= 1");
    std::vector<double> pts(count), r(count);
    for (std::size_t i = 0; i < count; ++i) {
      pts[i] = count == 1 ? 0.5
                          : eps + (1.0 - 2.0 * eps) * static_cast<double>(i) /
                                      static_cast<double>(count - 1);
      r[i] = pvalue_density_ratio(pts[i], spec);
    }
    return DensityRatioGrid(std::move(pts), std::move(r));
  }

  std::span<const double> points() const { return points_; }
  std::span<const double> ratios() const { return ratios_; }
  bool empty() const { return points_.empty(); }

private:
  std::vector<double> points_;
  std::vector<double> ratios_;
};

/// pi1 * (1 - essinf f1/f0), the essential infimum approximated by the grid minimum.
inline double pi1_lower_bound(double pi1, const DensityRatioGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("pi1_lower_bound: empty grid");
  if (!(pi1 >= 0.0 && pi1 <= 1.0))
    throw std::invalid_argument("pi1_lower_bound: pi1 must lie in [0,1]");
  const auto r = grid.ratios();
  const double essinf = *std::min_element(r.begin(), r.end());
  return std::clamp(pi1 * (1.0 - essinf), 0.0, 1.0);
}

}  // namespace pinull

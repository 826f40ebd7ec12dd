#pragma once

// Natural cubic smoothing spline with knots at every abscissa, in the
// value/second-derivative (Reinsch) parametrisation:
//   minimise  sum_i (y_i - g_i)^2 + alpha * integral g''(x)^2 dx
// The smoothing level is fixed by the target effective degrees of freedom,
// trace of the smoother matrix. Everything that depends only on the abscissae
// is computed once in the constructor, so one object serves many fits.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pinull {

class CubicSmoothingSpline {
public:
  struct Fit {
    std::vector<double> values;   // g(x_i)
    std::vector<double> second;   // g''(x_i), zero at both ends
  };

  CubicSmoothingSpline(std::vector<double> knots, double target_df)
      : knots_(std::move(knots)), target_df_(target_df) {
    const std::size_t n = knots_.size();
    if (n < 4) throw std::invalid_argument("CubicSmoothingSpline: need at least 4 distinct knots");
    for (std::size_t i = 1; i < n; ++i)
      if (!(knots_[i] > knots_[i - 1]))
        throw std::invalid_argument("CubicSmoothingSpline: knots must be strictly increasing");
    if (!(target_df > 2.0 && target_df < static_cast<double>(n)))
      throw std::invalid_argument("CubicSmoothingSpline: target df must lie in (2, n)");

    build_band_matrices();
    alpha_ = solve_for_alpha();
    factor_ = Eigen::LDLT<Eigen::MatrixXd>(r_ + alpha_ * qtq_);
    df_ = trace_for(alpha_);
  }

  double alpha() const { return alpha_; }
  double effective_df() const { return df_; }
  std::span<const double> knots() const { return knots_; }

  Fit fit(std::span<const double> y) const {
    const std::size_t n = knots_.size();
    if (y.size() != n) throw std::invalid_argument("CubicSmoothingSpline: y has wrong length");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd gamma = factor_.solve(q_.transpose() * yv);
    const Eigen::VectorXd g = yv - alpha_ * (q_ * gamma);
    Fit out{std::vector<double>(g.data(), g.data() + n), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i + 2 < n; ++i) out.second[i + 1] = gamma[static_cast<Eigen::Index>(i)];
    return out;
  }

  /// Spline value at x; linear continuation outside the knot range.
  double evaluate(const Fit& f, double x) const {
    const auto& t = knots_;
    const std::size_t n = t.size();
    const auto& g = f.values;
    const auto& c = f.second;
    if (x >= t[n - 1]) {
      const double h = t[n - 1] - t[n - 2];
      const double slope = (g[n - 1] - g[n - 2]) / h + h * c[n - 2] / 6.0;
      return g[n - 1] + slope * (x - t[n - 1]);
    }
    if (x <= t[0]) {
      const double h = t[1] - t[0];
      const double slope = (g[1] - g[0]) / h - h * c[1] / 6.0;
      return g[0] - slope * (t[0] - x);
    }
    std::size_t i = 0;
    while (x > t[i + 1]) ++i;
    const double h = t[i + 1] - t[i];
    const double a = x - t[i];
    const double b = t[i + 1] - x;
    return (a * g[i + 1] + b * g[i]) / h -
           a * b / 6.0 * ((1.0 + a / h) * c[i + 1] + (1.0 + b / h) * c[i]);
  }

private:
  void build_band_matrices() {
    const std::size_t n = knots_.size();
    const auto m = static_cast<Eigen::Index>(n - 2);
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = knots_[i + 1] - knots_[i];
    q_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), m);
    r_ = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto k = static_cast<std::size_t>(j) + 1;  // interior knot index
      q_(j, j) = 1.0 / h[k - 1];
      q_(j + 1, j) = -1.0 / h[k - 1] - 1.0 / h[k];
      q_(j + 2, j) = 1.0 / h[k];
      r_(j, j) = (h[k - 1] + h[k]) / 3.0;
      if (j + 1 < m) r_(j, j + 1) = r_(j + 1, j) = h[k] / 6.0;
    }
    qtq_ = q_.transpose() * q_;
  }

  // tr S(alpha) = n - alpha * tr((R + alpha Q'Q)^-1 Q'Q)
  double trace_for(double alpha) const {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(r_ + alpha * qtq_);
    const Eigen::MatrixXd z = ldlt.solve(qtq_);
    return static_cast<double>(knots_.size()) - alpha * z.trace();
  }

  double solve_for_alpha() const {
    double lo = -16.0, hi = 16.0;  // log10 alpha
    if (trace_for(std::pow(10.0, lo)) < target_df_ || trace_for(std::pow(10.0, hi)) > target_df_)
      throw std::runtime_error("CubicSmoothingSpline: cannot bracket the target df");
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (trace_for(std::pow(10.0, mid)) > target_df_)
        lo = mid;
      else
        hi = mid;
    }
    return std::pow(10.0, 0.5 * (lo + hi));
  }

  std::vector<double> knots_;
  double target_df_;
  double alpha_ = 0.0;
  double df_ = 0.0;
  Eigen::MatrixXd q_, r_, qtq_;
  Eigen::LDLT<Eigen::MatrixXd> factor_;
};

}  // namespace pinull

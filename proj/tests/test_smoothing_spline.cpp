#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "pinull/smoothing_spline.hpp"

using namespace pinull;
using Catch::Approx;

namespace {

std::vector<double> grid(std::size_t n, double step) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = step * static_cast<double>(i);
  return x;
}

}  // namespace

TEST_CASE("effective degrees of freedom hit the target") {
  for (double df : {2.5, 3.0, 5.0, 10.0}) {
    const CubicSmoothingSpline s(grid(96, 0.01), df);
    CHECK(s.effective_df() == Approx(df).margin(0.01));
    CHECK(s.alpha() > 0.0);
  }
}

TEST_CASE("constants and straight lines are reproduced") {
  const CubicSmoothingSpline s(grid(96, 0.01), 3.0);
  const auto c = s.fit(std::vector<double>(96, 0.7));
  for (double v : c.values) CHECK(v == Approx(0.7).margin(1e-10));
  CHECK(s.evaluate(c, 1.0) == Approx(0.7).margin(1e-10));

  std::vector<double> y(96);
  for (std::size_t i = 0; i < 96; ++i) y[i] = 0.3 + 0.4 * 0.01 * static_cast<double>(i);
  const auto l = s.fit(y);
  for (std::size_t i = 0; i < 96; ++i) CHECK(l.values[i] == Approx(y[i]).margin(1e-9));
  for (double g2 : l.second) CHECK(g2 == Approx(0.0).margin(1e-7));
  CHECK(s.evaluate(l, 1.0) == Approx(0.7).margin(1e-6));
  CHECK(s.evaluate(l, -0.5) == Approx(0.1).margin(1e-6));
}

TEST_CASE("fit solves the penalised least-squares normal equations") {
  const auto x = grid(30, 0.1);
  const CubicSmoothingSpline s(x, 4.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.2);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::sin(x[i]) + noise(rng);
  const auto f = s.fit(y);

  // (g - y) + alpha * Q R^-1 Q' g = 0, with Q, R as in the Reinsch form
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n - 2), R = Eigen::MatrixXd::Zero(n - 2, n - 2);
  for (Eigen::Index j = 0; j < n - 2; ++j) {
    const double h0 = x[j + 1] - x[j], h1 = x[j + 2] - x[j + 1];
    Q(j, j) = 1 / h0;
    Q(j + 1, j) = -1 / h0 - 1 / h1;
    Q(j + 2, j) = 1 / h1;
    R(j, j) = (h0 + h1) / 3;
    if (j + 1 < n - 2) R(j, j + 1) = R(j + 1, j) = h1 / 6;
  }
  const Eigen::MatrixXd K = Q * R.inverse() * Q.transpose();
  const Eigen::Map<const Eigen::VectorXd> g(f.values.data(), n), yy(y.data(), n);
  const Eigen::VectorXd resid = (g - yy) + s.alpha() * K * g;
  CHECK(resid.cwiseAbs().maxCoeff() < 1e-9);

  // trace of (I + alpha K)^-1 is the reported df
  const Eigen::MatrixXd S = (Eigen::MatrixXd::Identity(n, n) + s.alpha() * K).inverse();
  CHECK(S.trace() == Approx(s.effective_df()).margin(1e-6));

  // the curve passes through the fitted values and has continuous slope at knots
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(s.evaluate(f, x[i]) == Approx(f.values[i]).margin(1e-12));
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double e = 1e-6;
    const double left = (s.evaluate(f, x[i]) - s.evaluate(f, x[i] - e)) / e;
    const double right = (s.evaluate(f, x[i] + e) - s.evaluate(f, x[i])) / e;
    CHECK(left == Approx(right).margin(1e-4));
  }
  // linear beyond the last knot
  const double a = s.evaluate(f, 3.0), b = s.evaluate(f, 3.5), c = s.evaluate(f, 4.0);
  CHECK(b - a == Approx(c - b).margin(1e-12));
}

TEST_CASE("spline validation") {
  CHECK_THROWS_AS(CubicSmoothingSpline({0.0, 0.1, 0.2}, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(CubicSmoothingSpline({0.0, 0.1, 0.1, 0.2}, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(CubicSmoothingSpline(grid(10, 0.1), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(CubicSmoothingSpline(grid(10, 0.1), 10.0), std::invalid_argument);
  const CubicSmoothingSpline s(grid(10, 0.1), 3.0);
  CHECK_THROWS_AS(s.fit(std::vector<double>(9, 0.0)), std::invalid_argument);
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pinull/dependence.hpp"
#include "pinull/oracles.hpp"
#include "pinull/patra_sen.hpp"

using namespace pinull;
using Catch::Approx;

namespace {

std::vector<double> uniform_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& v : p) v = u(rng);
  return p;
}

double sq_objective(const std::vector<double>& in, const std::vector<double>& fit) {
  double s = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) s += (in[i] - fit[i]) * (in[i] - fit[i]);
  return s / static_cast<double>(in.size());
}

}  // namespace

TEST_CASE("naive_f1") {
  const std::vector<double> fn{0.25, 0.5, 0.75, 1.0}, f0{0.1, 0.4, 0.6, 0.9};
  CHECK(naive_f1(fn, f0, 1.0) == fn);
  const auto h = naive_f1(fn, f0, 0.5);
  CHECK(h[0] == Approx(0.4));
  CHECK(h[3] == Approx(1.1));
  // F_n = F0 is a fixed point for every gamma
  for (double g : {0.01, 0.3, 0.9}) {
    const auto v = naive_f1(f0, f0, g);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == Approx(f0[i]));
  }
  CHECK_THROWS_AS(naive_f1(fn, f0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(naive_f1(fn, std::vector<double>{0.1}, 0.5), std::invalid_argument);
}

TEST_CASE("project_to_cdf examples") {
  const auto a = project_to_cdf(std::vector<double>{0.5, 0.2, 0.8});
  CHECK(a[0] == Approx(0.35));
  CHECK(a[1] == Approx(0.35));
  CHECK(a[2] == Approx(0.8));
  CHECK(project_to_cdf(std::vector<double>{-0.2, 0.5, 1.3}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(project_to_cdf(std::vector<double>{2.0, 1.5, -3.0})[0] == Approx(1.0 / 6.0));
  CHECK_THROWS_AS(project_to_cdf(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("project_to_cdf is optimal and idempotent") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v(1 + t % 10);
    for (auto& x : v) x = u(rng);
    const auto p = project_to_cdf(v);
    REQUIRE(std::is_sorted(p.begin(), p.end()));
    REQUIRE(p.front() >= 0.0);
    REQUIRE(p.back() <= 1.0);
    REQUIRE(sq_objective(v, p) == Approx(bounded_isotonic_bruteforce(v)).margin(1e-12));
    REQUIRE(project_to_cdf(p) == p);
  }
}

TEST_CASE("gamma_grid") {
  const auto g = gamma_grid(0.001);
  REQUIRE(g.size() == 1000);
  CHECK(g.front() == 0.001);
  CHECK(g.back() == 1.0);
  const auto h = gamma_grid(0.003);
  REQUIRE(h.size() == 334);
  CHECK(h[332] == Approx(0.999));
  CHECK(h.back() == 1.0);
  CHECK_THROWS_AS(gamma_grid(0.0), std::invalid_argument);
}

TEST_CASE("distance curve endpoints and bound") {
  const auto p = generate_sample(10000, DependenceSpec::iid(), {1.0, 2.0, 1.0}, 31).pvalues;
  const auto sorted = SortedSample::from_unsorted(p);
  const auto fn = ecdf_at_sample(sorted);
  const double d0 = dn_distance(fn, std::vector<double>(sorted.values().begin(), sorted.values().end()));

  ProjectionCurve curve(p, UniformCdf{});
  CHECK(curve.distance(1.0) == 0.0);
  CHECK(curve.distance(1e-4) == Approx(d0).margin(1e-3));

  const auto gammas = gamma_grid(0.01);
  const auto c = gamma_distance_curve(p, UniformCdf{}, gammas);
  REQUIRE(c.distances.size() == gammas.size());
  for (double d : c.distances) CHECK(d <= d0 + 1e-12);
}

TEST_CASE("scaled distance identity at the true mixture") {
  const GaussianMixtureSpec mix{0.7, 2.0, 1.0};
  const auto F = [&](double t) { return mix.pi0 * t + mix.pi1() * alt_pvalue_cdf(t, mix); };
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto sorted = SortedSample::from_unsorted(generate_sample(1000, DependenceSpec::iid(), mix, s).pvalues);
    const auto fn = ecdf_at_sample(sorted);
    std::vector<double> f0(sorted.values().begin(), sorted.values().end()), fv(f0.size());
    for (std::size_t i = 0; i < f0.size(); ++i) fv[i] = F(f0[i]);
    const double rhs = dn_distance(fn, fv);
    for (double g : {0.05, 0.3, 0.7, 1.0}) {
      const double lhs = g * dn_distance(naive_f1(fn, f0, g), naive_f1(fv, f0, g));
      REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("cn_fixed") {
  CHECK(cn_fixed(1000) == Approx(0.19326).margin(1e-4));
  CHECK(cn_fixed(16) == Approx(0.10197).margin(1e-4));
  double prev = 0.0;
  for (std::size_t n = 3; n < 100000; n = n * 3 + 1) {
    CHECK(cn_fixed(n) > prev);
    prev = cn_fixed(n);
  }
  CHECK_THROWS_AS(cn_fixed(2), std::invalid_argument);
}

TEST_CASE("estimate_pi1") {
  SECTION("near zero under the global null") {
    // at n = 1000 only about 85% of seeds reach 0.05; the rate climbs with n
    int small_1e3 = 0, small_1e4 = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      small_1e3 += estimate_pi1(uniform_sample(1000, 700 + s), UniformCdf{}, cn_fixed(1000)).pi1_hat <= 0.05;
      small_1e4 += estimate_pi1(uniform_sample(10000, 700 + s), UniformCdf{}, cn_fixed(10000)).pi1_hat <= 0.05;
    }
    CHECK(small_1e4 >= 95);
    CHECK(small_1e3 <= small_1e4);
  }
  SECTION("a huge threshold stops at the first grid point") {
    const auto p = generate_sample(500, DependenceSpec::iid(), {0.5, 2.0, 1.0}, 3).pvalues;
    const auto e = estimate_pi1(p, UniformCdf{}, 1e6);
    CHECK(e.pi1_hat == 0.001);
    CHECK(e.pi0_hat() == Approx(0.999));
    CHECK(e.curve.gammas.size() == 1);
  }
  SECTION("result bookkeeping") {
    const auto p = generate_sample(2000, DependenceSpec::iid(), {0.6, 2.0, 1.0}, 4).pvalues;
    const double c = cn_fixed(2000);
    const auto e = estimate_pi1(p, UniformCdf{}, c);
    REQUIRE_FALSE(e.curve.gammas.empty());
    CHECK(e.curve.gammas.back() == e.pi1_hat);
    CHECK(e.curve.distances.back() <= c / std::sqrt(2000.0));
    for (std::size_t k = 0; k + 1 < e.curve.distances.size(); ++k)
      CHECK(e.curve.distances[k] > c / std::sqrt(2000.0));
    const auto r = e.to_result();
    CHECK(r.estimator == "patra_sen_fixed");
    CHECK(r.pi0_hat == Approx(1.0 - e.pi1_hat));
    CHECK(*r.find("c_n") == c);
  }
  SECTION("validation") {
    const auto p = uniform_sample(100, 1);
    CHECK_THROWS_AS(estimate_pi1(p, UniformCdf{}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_pi1(p, UniformCdf{}, 0.1, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(estimate_pi1(p, UniformCdf{}, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_pi1(std::vector<double>{}, UniformCdf{}, 0.1), std::invalid_argument);
  }
}

TEST_CASE("cross-validated c") {
  const auto p = generate_sample(2000, DependenceSpec::iid(), {0.9, 2.0, 1.0}, 12).pvalues;
  const std::vector<double> one{0.3};
  CHECK(cn_cross_validated(p, UniformCdf{}, one, 10, 1) == 0.3);

  const std::vector<double> cands{0.05, 0.1932, 1.0};
  const double chosen = cn_cross_validated(p, UniformCdf{}, cands, 10, 1);
  CHECK(std::find(cands.begin(), cands.end(), chosen) != cands.end());
  CHECK(cn_cross_validated(p, UniformCdf{}, cands, 10, 1) == chosen);

  double worst = 0.0;
  for (double c : cands) worst = std::max(worst, std::abs(estimate_pi1(p, UniformCdf{}, c).pi0_hat() - 0.9));
  const auto cv = estimate_pi1_cv(p, UniformCdf{}, cands, 10, 1);
  CHECK(std::abs(cv.pi0_hat() - 0.9) <= worst);
  CHECK(cv.c_n == chosen);
  CHECK(cv.to_result().estimator == "patra_sen_cv");

  const std::vector<double> dup{0.2, 0.2};
  CHECK(cn_cross_validated(p, UniformCdf{}, dup, 5, 1) == 0.2);

  CHECK_THROWS_AS(cn_cross_validated(uniform_sample(15, 1), UniformCdf{}, cands, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(cn_cross_validated(p, UniformCdf{}, std::vector<double>{}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(cn_cross_validated(p, UniformCdf{}, cands, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(cn_cross_validated(p, UniformCdf{}, std::vector<double>{0.1, -1.0}, 10, 1), std::invalid_argument);
}

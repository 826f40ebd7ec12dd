#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "pinull/dependence.hpp"
#include "pinull/storey.hpp"

using namespace pinull;
using Catch::Approx;

namespace {

struct IdentityResampler {
  void operator()(std::size_t n, std::size_t, std::vector<std::size_t>& out) const {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
  }
};

std::vector<double> uniform_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& v : p) v = u(rng);
  return p;
}

}  // namespace

TEST_CASE("storey_at") {
  const std::vector<double> p{0.1, 0.3, 0.6, 0.9};
  CHECK(storey_at(p, 0.5) == Approx(1.0));
  CHECK(storey_at(p, 0.8) == Approx(1.25));
  CHECK(storey_at(p, 0.0) == 1.0);
  CHECK(storey_at(p, 0.9) == 0.0);  // strict inequality
  CHECK_THROWS_AS(storey_at(p, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(storey_at(std::vector<double>{}, 0.5), std::invalid_argument);
}

TEST_CASE("lambda grid") {
  const auto g = LambdaGrid::standard();
  REQUIRE(g.size() == 96);
  CHECK(g[0] == 0.0);
  CHECK(g[95] == Approx(0.95));
  CHECK_THROWS_AS(LambdaGrid({0.5, 0.4, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(LambdaGrid({0.2, 1.0}), std::invalid_argument);
}

TEST_CASE("storey_curve agrees with storey_at pointwise") {
  const auto g = LambdaGrid::standard();
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto p = uniform_sample(997, s);
    p[3] = 0.25;  // a value exactly on the grid
    p[4] = 0.95;
    const auto c = storey_curve(p, g);
    for (std::size_t k = 0; k < g.size(); ++k) REQUIRE(c.estimates[k] == Approx(storey_at(p, g[k])).epsilon(1e-14));
  }
}

TEST_CASE("smoother on tabulated curves") {
  const auto g = LambdaGrid::standard();
  const StoreySmoother sm(g);
  CHECK(sm.spline().effective_df() == Approx(3.0).margin(0.01));

  const auto c = sm.from_curve(std::vector<double>(g.size(), 0.8));
  CHECK(c.pi0_hat == Approx(0.8).margin(1e-9));

  const auto over = sm.from_curve(std::vector<double>(g.size(), 1.3));
  CHECK(over.pi0_hat == 1.0);
  CHECK(*over.find("f_hat_1") == Approx(1.3).margin(1e-9));

  std::vector<double> line(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) line[k] = 0.4 + 0.3 * g[k];
  CHECK(sm.from_curve(line).pi0_hat == Approx(0.7).margin(1e-8));

  for (std::size_t k = 0; k < g.size(); ++k) line[k] = 0.4 - 0.6 * g[k];
  CHECK(sm.from_curve(line).pi0_hat == 0.0);
}

TEST_CASE("smoother estimates stay in [0,1] and match the free function") {
  const auto g = LambdaGrid::standard();
  const StoreySmoother sm(g);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto smp = generate_sample(2000, DependenceSpec::iid(), {0.7, 2.0, 1.0}, s);
    const auto a = sm(smp.pvalues);
    CHECK(a.estimator == "storey_smoother");
    CHECK(a.pi0_hat >= 0.0);
    CHECK(a.pi0_hat <= 1.0);
    CHECK(a.pi0_hat == storey_smoother(smp.pvalues, g).pi0_hat);
  }
}

TEST_CASE("bootstrap tie-break and plug-in") {
  const auto g = LambdaGrid::standard();
  // pi0(lambda) = 2 below 0.5 and 0 from 0.5 on; every zero ties, the first wins
  const std::vector<double> same(200, 0.5);
  const auto r = storey_bootstrap(same, g, 10, 1);
  CHECK(*r.find("lambda_star") == Approx(0.5));
  CHECK(r.pi0_hat == 0.0);
  CHECK(*r.find("mse") == 0.0);

  SECTION("identity resampling picks the minimiser of the curve") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto p = generate_sample(500, DependenceSpec::iid(), {0.6, 2.0, 1.0}, 40 + s).pvalues;
      const auto curve = storey_curve(p, g);
      const auto best = std::min_element(curve.estimates.begin(), curve.estimates.end());
      const auto est = storey_bootstrap(p, g, 1, IdentityResampler{});
      CHECK(est.pi0_hat == Approx(std::min(1.0, *best)));
      CHECK(*est.find("lambda_star") == g[static_cast<std::size_t>(best - curve.estimates.begin())]);
      CHECK(*est.find("mse") == 0.0);
    }
  }
}

TEST_CASE("bootstrap is deterministic and bounded") {
  const auto g = LambdaGrid::standard();
  const auto p = generate_sample(3000, DependenceSpec::ar1(0.5), {0.8, 2.0, 1.0}, 5).pvalues;
  const auto a = storey_bootstrap(p, g, 50, 17);
  const auto b = storey_bootstrap(p, g, 50, 17);
  CHECK(a.pi0_hat == b.pi0_hat);
  CHECK(*a.find("lambda_star") == *b.find("lambda_star"));
  CHECK(a.pi0_hat >= 0.0);
  CHECK(a.pi0_hat <= 1.0);
  CHECK(*a.find("plug_in") <= a.pi0_hat + 1e-15);
  CHECK_THROWS_AS(storey_bootstrap(p, g, 0, 1), std::invalid_argument);
}

TEST_CASE("storey_asymptotic_limit") {
  const GaussianMixtureSpec mix{0.5, 2.0, 1.0};
  CHECK(storey_asymptotic_limit(0.0, mix) == Approx(1.0));
  CHECK(storey_asymptotic_limit(0.5, mix) == Approx(0.52275).margin(1e-4));
  CHECK(storey_asymptotic_limit(0.5, GaussianMixtureSpec{1.0, 2.0, 1.0}) == 1.0);
  double prev = 1.0;
  for (double l = 0.0; l < 0.96; l += 0.05) {
    const double v = storey_asymptotic_limit(l, mix);
    CHECK(v >= mix.pi0);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK_THROWS_AS(storey_asymptotic_limit(1.0, mix), std::invalid_argument);
}

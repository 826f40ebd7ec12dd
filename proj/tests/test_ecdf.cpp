#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pinull/ecdf.hpp"

using namespace pinull;
using Catch::Approx;

TEST_CASE("ecdf_at_sample") {
  CHECK(ecdf_at_sample(SortedSample({0.1, 0.2, 0.3, 0.4})) == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(ecdf_at_sample(SortedSample({0.7})) == std::vector<double>{1.0});
  const auto tied = ecdf_at_sample(SortedSample({1.0, 1.0, 2.0}));
  CHECK(tied[0] == Approx(2.0 / 3.0));
  CHECK(tied[1] == Approx(2.0 / 3.0));
  CHECK(tied[2] == 1.0);
}

TEST_CASE("SortedSample validation") {
  CHECK_THROWS_AS(SortedSample({}), std::invalid_argument);
  CHECK_THROWS_AS(SortedSample({0.2, 0.1}), std::invalid_argument);
  const auto s = SortedSample::from_unsorted({0.3, 0.1, 0.2});
  CHECK(s[0] == 0.1);
  CHECK(s.size() == 3);
}

TEST_CASE("dn_distance") {
  const std::vector<double> f{0.1, 0.4, 0.9};
  CHECK(dn_distance(f, f) == 0.0);
  CHECK(dn_distance(f, std::vector<double>{0.35, 0.65, 1.15}) == Approx(0.25));
  CHECK(dn_distance(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 0.0}) == Approx(1.0));
  CHECK_THROWS_AS(dn_distance(f, std::vector<double>{0.1}), std::invalid_argument);
  CHECK_THROWS_AS(dn_distance(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("dn_distance properties on random vectors") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a(1 + t % 17), b(a.size()), c(a.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
      sup = std::max(sup, std::abs(a[i] - b[i]));
    }
    REQUIRE(dn_distance(a, b) <= sup + 1e-15);
    REQUIRE(dn_distance(a, b) == Approx(dn_distance(b, a)));
    REQUIRE(dn_distance(a, c) <= dn_distance(a, b) + dn_distance(b, c) + 1e-15);
  }
}

TEST_CASE("sup_norm_to_cdf") {
  const auto id = [](double t) { return t; };
  CHECK(sup_norm_to_cdf(SortedSample({0.3}), id) == Approx(0.7));
  CHECK(sup_norm_to_cdf(SortedSample({0.8}), id) == Approx(0.8));
  CHECK(sup_norm_to_cdf(SortedSample({0.2, 0.9}), [](double) { return 0.5; }) == Approx(0.5));

  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(100000);
    for (auto& v : x) v = u(rng);
    ok += sup_norm_to_cdf(SortedSample::from_unsorted(std::move(x)), id) < 0.01;
  }
  CHECK(ok >= 99);
}

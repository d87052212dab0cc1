#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "oracles.hpp"
#include "poexp/errors.hpp"
#include "poexp/poexp_distribution.hpp"

using namespace poexp;
using boost::math::quadrature::gauss_kronrod;

namespace {

PoExpParams fig3() { return {IntensitySequence::constant(1.5), IntensitySequence::affine(1.0, 1.0)}; }
PoExpParams example_a() {
  return {IntensitySequence({}, TailRule::quadratic(0.5)), IntensitySequence({}, TailRule::quadratic(0.5))};
}
PoExpParams example_b() { return {IntensitySequence::affine(1.0, 1.0), IntensitySequence::constant(1.0)}; }
PoExpParams example_c() { return {IntensitySequence::constant(1.0), IntensitySequence({}, TailRule::reciprocal(1.0))}; }

}  // namespace

TEST_SUITE("poexp") {
  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(PoExpParams(IntensitySequence::constant(2.0), IntensitySequence::constant(0.5)),
                    DegenerateSpacing);
    CHECK_NOTHROW(fig3());
  }

  TEST_CASE("joint laws at time zero and their sum") {
    const PoExpParams p = fig3();
    CHECK(joint_survivor(p, 0.0, 0) == 1.0);
    CHECK(joint_survivor(p, 0.0, 2) == 0.0);
    const PoExpDistribution d(p);
    for (double t : {0.2, 1.0, 3.0}) {
      double s = 0.0, f = 0.0;
      for (std::size_t n = 0; n < 60; ++n) {
        s += joint_survivor(p, t, n);
        f += joint_density(p, t, n);
      }
      CHECK(s == doctest::Approx(d.survivor(t).value).epsilon(1e-12));
      CHECK(f == doctest::Approx(d.density(t).value).epsilon(1e-12));
    }
  }

  TEST_CASE("series and fallback agree where both exist") {
    for (const PoExpParams& p : {fig3(), example_a()}) {
      const PoExpDistribution d(p);
      REQUIRE(d.series_available());
      for (double t : {0.0, 0.1, 0.5, 1.0, 2.0, 4.0}) {
        CHECK(d.survivor_series(t) == doctest::Approx(d.survivor_fallback(t)).epsilon(1e-11));
        CHECK(d.density_series(t) == doctest::Approx(d.density_fallback(t)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("density at zero is the first hazard") {
    for (const PoExpParams& p : {fig3(), example_a(), example_b(), example_c()}) {
      const PoExpDistribution d(p);
      CHECK(d.density(0.0).value == p.mu.term(0));
      CHECK(d.survivor(0.0).value == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("density integrates to the distribution function") {
    const PoExpDistribution d(example_a());
    for (double t : {0.5, 1.5}) {
      const double mass = gauss_kronrod<double, 31>::integrate([&](double u) { return d.density(u).value; }, 0.0, t,
                                                               8, 1e-13);
      CHECK(mass == doctest::Approx(1.0 - d.survivor(t).value).epsilon(1e-10));
    }
  }

  TEST_CASE("mean equals the integrated survivor") {
    const PoExpDistribution d(fig3());
    const double area = gauss_kronrod<double, 61>::integrate([&](double u) { return d.survivor(u).value; }, 0.0,
                                                             std::numeric_limits<double>::infinity(), 10, 1e-13);
    CHECK(d.moment(1).value == doctest::Approx(area).epsilon(1e-10));
    const double second = gauss_kronrod<double, 61>::integrate(
        [&](double u) { return 2 * u * d.survivor(u).value; }, 0.0, std::numeric_limits<double>::infinity(), 10,
        1e-13);
    CHECK(d.moment(2).value == doctest::Approx(second).epsilon(1e-9));
    REQUIRE(d.moment(2).series_value);
    CHECK(*d.moment(2).series_value == doctest::Approx(d.moment(2).value).epsilon(1e-11));
  }

  TEST_CASE("worked examples") {
    const PoExpDistribution a(example_a());
    CHECK(a.series_available());
    CHECK(a.moment(1).value == doctest::Approx(oracle::example_a_mean()).epsilon(1e-12));

    // λ_n = n + 1, μ ≡ 1: b_0 diverges and T is a unit exponential.
    const PoExpDistribution b(example_b());
    CHECK_FALSE(b.series_available());
    CHECK_THROWS_AS((void)b.survivor_series(1.0), SeriesDiverged);
    CHECK(b.survivor(2.0).method == Method::fallback);
    CHECK(b.survivor(2.0).value == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(b.density(1.0).value == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(b.moment(1).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.moment(2).value == doctest::Approx(2.0).epsilon(1e-8));

    const PoExpDistribution c(example_c());
    CHECK_FALSE(c.series_available());
    CHECK(c.moment(1).infinite);
    CHECK(std::isinf(c.moment(1).value));
    CHECK(c.survivor(1.0).value > 0.0);
  }

  TEST_CASE("grid evaluation matches pointwise evaluation") {
    const PoExpDistribution d(example_b());
    const std::vector<double> times{0.0, 0.25, 1.0, 2.0};
    const auto g = d.on_grid(times);
    CHECK(g.method == Method::fallback);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(g.survivor[i] == doctest::Approx(std::exp(-times[i])).epsilon(1e-12));
      CHECK(g.density[i] == doctest::Approx(std::exp(-times[i])).epsilon(1e-12));
    }
  }

  TEST_CASE("Laplace transform of the accumulated hazard") {
    const PoExpParams p = fig3();
    const PoExpDistribution d(p);
    CHECK(mgf_xi(p, 0.0, 1.0) == 1.0);
    CHECK(mgf_xi(p, 2.0, 0.0) == 1.0);
    for (double t : {0.5, 2.0}) CHECK(mgf_xi(p, 1.0, t) == doctest::Approx(d.survivor(t).value).epsilon(1e-11));
    // Constant hazard μ: ξ(t) = μt exactly.
    const PoExpParams e(IntensitySequence::affine(1.0, 1.0), IntensitySequence::constant(0.7));
    CHECK(mgf_xi(e, 1.3, 2.0) == doctest::Approx(std::exp(-1.3 * 0.7 * 2.0)).epsilon(1e-12));
  }

  TEST_CASE("tilted rates that coincide name the offending z") {
    // λ_n = n + 2, μ_n = 1/(n+1): at z = 2 the first two tilted rates are both 4.
    const PoExpParams p(IntensitySequence::affine(2.0, 1.0), IntensitySequence({}, TailRule::reciprocal(1.0)));
    try {
      (void)mgf_xi(p, 2.0, 1.0);
      FAIL("expected DegenerateSpacing");
    } catch (const DegenerateSpacing& e) {
      CHECK(std::string(e.what()).find("z = 2") != std::string::npos);
    }
  }

  TEST_CASE("sampler matches the joint survivor") {
    const PoExpParams p = fig3();
    const std::size_t n_samples = 40000;
    const double t = 0.5;
    std::vector<RunningStats> st(4);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
      RandomStream rng(2024, i);
      const PoExpSample s = sample(p, rng);
      std::size_t shocks = 0;
      for (double u : s.shock_times) shocks += u <= t;
      for (std::size_t n = 0; n < 4; ++n) st[n].add(s.T > t && shocks == n ? 1.0 : 0.0);
    }
    for (std::size_t n = 0; n < 4; ++n) {
      CHECK(std::abs(st[n].mean - joint_survivor(p, t, n)) < 4.5 * st[n].standard_error());
    }
  }

  TEST_CASE("sampler stops at the event cap") {
    const PoExpParams p(IntensitySequence({}, TailRule::quadratic(1.0)), IntensitySequence({}, TailRule::reciprocal(0.01)));
    bool capped = false;
    for (std::uint64_t i = 0; i < 20 && !capped; ++i) {
      RandomStream rng(3, i);
      try {
        (void)sample(p, rng, 100);
      } catch (const ExplosionCap& e) {
        capped = true;
        CHECK(e.cap == 100);
      }
    }
    CHECK(capped);
  }
}

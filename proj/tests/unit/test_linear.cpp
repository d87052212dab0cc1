#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "poexp/linear_case.hpp"
#include "poexp/special.hpp"

using namespace poexp;
using boost::math::quadrature::gauss_kronrod;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("linear") {
  TEST_CASE("closed forms agree with the general series") {
    for (const LinearCaseParams& p : {LinearCaseParams(1.5, 1.0, 1.0), LinearCaseParams(0.4, 2.0, 0.3)}) {
      const PoExpDistribution d(p.to_poexp());
      REQUIRE(d.series_available());
      for (double t = 0.0; t <= 5.0; t += 0.25) {
        CHECK(d.survivor_series(t) == doctest::Approx(survivor_linear(p, t)).epsilon(1e-10));
        CHECK(d.density_series(t) == doctest::Approx(density_linear(p, t)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("density is the negative derivative of the survivor") {
    const LinearCaseParams p(1.5, 1.0, 1.0);
    const double h = 1e-5;
    for (double t : {0.3, 1.0, 2.5}) {
      const double fd = (survivor_linear(p, t - h) - survivor_linear(p, t + h)) / (2 * h);
      CHECK(fd == doctest::Approx(density_linear(p, t)).epsilon(1e-8));
    }
  }

  TEST_CASE("transform forms agree with quadrature") {
    const LinearCaseParams p(1.5, 1.0, 1.0);
    for (double z : {0.0, 0.5, 1.0, 3.0}) {
      const double quad = gauss_kronrod<double, 61>::integrate(
          [&](double t) { return std::exp(-z * t) * density_linear(p, t); }, 0.0, kInf, 10, 1e-14);
      CHECK(mgf_linear(p, z) == doctest::Approx(quad).epsilon(1e-10));
      CHECK(mgf_linear_gamma(p, z) == doctest::Approx(quad).epsilon(1e-10));
    }
  }

  TEST_CASE("moments agree with quadrature") {
    const LinearCaseParams p(1.5, 1.0, 1.0);
    for (unsigned m = 1; m <= 3; ++m) {
      const double quad = gauss_kronrod<double, 61>::integrate(
          [&](double t) { return m * std::pow(t, m - 1.0) * survivor_linear(p, t); }, 0.0, kInf, 10, 1e-14);
      CHECK(moment_linear(p, m) == doctest::Approx(quad).epsilon(1e-10));
      CHECK(PoExpDistribution(p.to_poexp()).moment(m).value == doctest::Approx(quad).epsilon(1e-10));
    }
    CHECK(mean_linear_gamma(p) == doctest::Approx(moment_linear(p, 1)).epsilon(1e-12));
  }

  TEST_CASE("density mode") {
    const LinearCaseParams p(1.5, 1.0, 1.0);
    const double mode = density_mode(p);
    // Golden-section search on the closed-form density.
    double a = 0.0, b = 2.0;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int i = 0; i < 200; ++i) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (density_linear(p, c) > density_linear(p, d)) {
        b = d;
      } else {
        a = c;
      }
    }
    CHECK(mode == doctest::Approx((a + b) / 2).epsilon(1e-6));
    // λν <= μ²: the density decreases from t = 0.
    CHECK(density_mode(LinearCaseParams(0.5, 1.0, 1.0)) == 0.0);
  }

  TEST_CASE("incomplete gamma") {
    for (double s : {0.3, 0.5, 1.0, 2.5, 7.0}) {
      for (double x : {0.0, 0.1, 1.0, 3.0, 9.0, 30.0}) {
        CHECK(lower_incomplete_gamma(s, x) == doctest::Approx(boost::math::tgamma_lower(s, x)).epsilon(1e-13));
        CHECK(regularized_lower_gamma(s, x) == doctest::Approx(boost::math::gamma_p(s, x)).epsilon(1e-13));
      }
    }
  }
}

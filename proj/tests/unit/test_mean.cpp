#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "poexp/mean_equations.hpp"

using namespace poexp;

namespace {

PatternParams fig1_pattern(double c_even, double c_odd) {
  return {Sequence(TailRule::periodic({c_even, c_odd})), JumpLawSequence::zero(), JumpLawSequence::zero(),
          IntensitySequence::affine(1.0, 1.0), IntensitySequence::constant(1.5)};
}

double at(const MeanGrid& g, const std::vector<double>& m, double t) {
  return m[static_cast<std::size_t>(std::lround(t / g.step))];
}

}  // namespace

TEST_SUITE("mean") {
  TEST_CASE("zero drift everywhere gives a zero mean") {
    const PatternParams s0{Sequence(TailRule::affine(1.0, 0.7)),
                           JumpLawSequence::constant(JumpLaw::discrete({-0.5, 0.1}, {0.5, 0.5})),
                           JumpLawSequence::constant(JumpLaw::deterministic(-0.7)), IntensitySequence::affine(1.0, 1.0),
                           IntensitySequence::constant(1.5)};
    const PatternParams s1{Sequence(TailRule::affine(-1.0, -0.5)),
                           JumpLawSequence::constant(JumpLaw::deterministic(0.25)),
                           JumpLawSequence::constant(JumpLaw::deterministic(1.0)), IntensitySequence::affine(0.5, 0.5),
                           IntensitySequence::constant(2.0)};
    const MeanGrid g = solve_mean_equations(s0, s1, 2.0, 0.01);
    for (std::size_t j = 0; j < g.times.size(); ++j) {
      CHECK(std::abs(g.M0[j]) < 1e-8);
      CHECK(std::abs(g.M1[j]) < 1e-8);
    }
  }

  TEST_CASE("a common constant slope gives c t") {
    const PatternParams s = fig1_pattern(0.8, 0.8);
    auto worst = [&](double h) {
      const MeanGrid g = solve_mean_equations(s, s, 2.0, h);
      double e = 0.0;
      for (std::size_t j = 0; j < g.times.size(); ++j) {
        e = std::max({e, std::abs(g.M0[j] - 0.8 * g.times[j]), std::abs(g.M1[j] - 0.8 * g.times[j])});
      }
      return e;
    };
    const double coarse = worst(0.02);
    const double fine = worst(0.01);
    CHECK(coarse < 1e-5);
    CHECK(fine < coarse / 3.5);
  }

  TEST_CASE("default step and grid layout") {
    const PatternParams s0 = fig1_pattern(0.5, 2.0), s1 = fig1_pattern(-1.0, -3.0);
    const MeanGrid g = solve_mean_equations(s0, s1, 2.0);
    CHECK(g.step == doctest::Approx(0.02));
    CHECK(g.times.size() == 101);
    CHECK(g.M0.front() == 0.0);
    CHECK(g.times.back() == doctest::Approx(2.0));
  }

  TEST_CASE("trapezoidal stepping converges at second order") {
    const PatternParams s0 = fig1_pattern(0.5, 2.0), s1 = fig1_pattern(-1.0, -3.0);
    const double t = 1.0;
    std::vector<double> v;
    for (double h : {0.04, 0.02, 0.01, 0.005}) {
      const MeanGrid g = solve_mean_equations(s0, s1, t, h);
      v.push_back(at(g, g.M0, t));
    }
    const double r1 = (v[0] - v[1]) / (v[1] - v[2]);
    const double r2 = (v[1] - v[2]) / (v[2] - v[3]);
    CHECK(r1 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(r2 == doctest::Approx(4.0).epsilon(0.15));
  }

  TEST_CASE("solver against simulation") {
    const PatternParams s0 = fig1_pattern(0.5, 2.0), s1 = fig1_pattern(-1.0, -3.0);
    const MeanGrid g = solve_mean_equations(s0, s1, 2.0, 0.01);
    const std::vector<double> times{0.5, 2.0};
    const auto mc0 = empirical_mean(s0, s1, 0, times, 20000, 77);
    const auto mc1 = empirical_mean(s0, s1, 1, times, 20000, 78);
    for (std::size_t j = 0; j < times.size(); ++j) {
      CHECK(std::abs(mc0.mean[j] - at(g, g.M0, times[j])) < 4.5 * mc0.standard_error[j]);
      CHECK(std::abs(mc1.mean[j] - at(g, g.M1, times[j])) < 4.5 * mc1.standard_error[j]);
    }
  }
}

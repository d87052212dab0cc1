#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "poexp/counting.hpp"
#include "poexp/errors.hpp"
#include "poexp/random.hpp"

using namespace poexp;

TEST_SUITE("counting") {
  TEST_CASE("constant rate gives the Poisson law") {
    const auto lam = IntensitySequence::constant(2.0);
    for (std::size_t n = 0; n < 10; ++n) {
      const double expected = std::exp(-2.0 * 1.5) * std::pow(3.0, double(n)) / std::tgamma(n + 1.0);
      CHECK(pmf_pi(lam, n, 1.5) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  TEST_CASE("Yule rates give the geometric law") {
    // λ_n = n + 1: P{N(t) = n} = e^{-t} (1 - e^{-t})^n
    const auto lam = IntensitySequence::affine(1.0, 1.0);
    for (double t : {0.3, 1.0, 2.0}) {
      for (std::size_t n = 0; n < 8; ++n) {
        const double expected = std::exp(-t) * std::pow(1 - std::exp(-t), double(n));
        CHECK(pmf_pi(lam, n, t) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("pmf at time zero") {
    const auto lam = IntensitySequence::affine(1.0, 2.0);
    CHECK(pmf_pi(lam, 0, 0.0) == 1.0);
    CHECK(pmf_pi(lam, 3, 0.0) == 0.0);
  }

  TEST_CASE("pmf table sums to one for non-explosive rates") {
    for (const auto& lam : {IntensitySequence::constant(3.0), IntensitySequence::affine(1.0, 1.0),
                            IntensitySequence::affine(0.5, 0.25)}) {
      for (double t : {0.5, 1.0, 2.0}) {
        const PmfTable tab = pmf_table(lam, t);
        double s = 0.0;
        for (double v : tab.values) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tab.tail_bound <= 1e-14);
      }
    }
  }

  TEST_CASE("pmf table tolerates repeated rates") {
    const IntensitySequence lam({1.0, 2.0, 1.0, 2.0}, TailRule::constant(1.5));
    const PmfTable tab = pmf_table(lam, 1.0);
    double s = 0.0;
    for (double v : tab.values) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tab.values[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  }

  TEST_CASE("explosive rates lose the explosion probability") {
    const IntensitySequence lam({}, TailRule::quadratic(1.0));
    const PmfTable tab = pmf_table(lam, 1.0);
    const std::size_t K = tab.values.size() - 1;
    CHECK(K >= 256);
    double s = 0.0;
    for (double v : tab.values) s += v;
    // Mass is conserved up to rounding over thousands of uniformization chunks.
    CHECK(std::abs(tab.tail_bound + s - 1.0) < 1e-10);
    // P{N(1) <= K} falls short of the no-explosion probability by P{K < N(1) < ∞}, at most the
    // mean Σ_{n>K} (n+1)⁻² of the remaining gaps times the density bound λ_0 = 1.
    const double p_inf = oracle::non_explosion_probability(1.0);
    CHECK(s <= p_inf + 1e-12);
    CHECK(p_inf - s <= 1.0 / static_cast<double>(K + 1));
  }

  TEST_CASE("sampled counts match the Poisson mean") {
    const auto lam = IntensitySequence::constant(2.0);
    RunningStats st;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      RandomStream rng(99, i);
      st.add(double(sample_counting_path(lam, 1.5, rng).count_at(1.5)));
    }
    CHECK(std::abs(st.mean - 3.0) < 4 * st.standard_error());
  }

  TEST_CASE("sampled path structure") {
    RandomStream rng(5);
    const CountingPath p = sample_counting_path(IntensitySequence::affine(1.0, 1.0), 2.0, rng);
    CHECK_FALSE(p.truncated);
    for (std::size_t i = 1; i < p.event_times.size(); ++i) CHECK(p.event_times[i] > p.event_times[i - 1]);
    if (!p.event_times.empty()) CHECK(p.event_times.back() <= 2.0);
    CHECK(p.count_at(2.0) == p.event_times.size());
    CHECK(p.count_at(0.0) == 0);
  }

  TEST_CASE("explosive paths are flagged at the cap") {
    const IntensitySequence lam({}, TailRule::quadratic(1.0));
    bool any = false;
    for (std::uint64_t i = 0; i < 50 && !any; ++i) {
      RandomStream rng(1, i);
      const CountingPath p = sample_counting_path(lam, 1.0, rng, 200);
      if (p.truncated) {
        any = true;
        CHECK(p.event_times.size() == 200);
      }
    }
    CHECK(any);
  }

  TEST_CASE("random streams are reproducible and distinct") {
    RandomStream a(7, 3), b(7, 3), c(7, 4);
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
  }

  TEST_CASE("block runner is independent of the worker count") {
    auto sum = [](std::size_t workers) {
      auto blocks = run_blocks<RunningStats>(5000, workers, [](std::size_t b, std::size_t e) {
        RunningStats s;
        for (std::size_t i = b; i < e; ++i) {
          RandomStream rng(11, i);
          s.add(rng.exponential(2.0));
        }
        return s;
      });
      RunningStats total;
      for (const auto& s : blocks) total.merge(s);
      return total;
    };
    const RunningStats one = sum(1), four = sum(4);
    CHECK(one.mean == four.mean);
    CHECK(one.m2 == four.m2);
    CHECK(one.count == 5000.0);
  }

  TEST_CASE("block runner rethrows the first failing block") {
    auto run = [](std::size_t workers) {
      try {
        (void)run_blocks<int>(4096, workers, [](std::size_t b, std::size_t) -> int {
          if (b >= 1024) throw std::runtime_error("block " + std::to_string(b));
          return 0;
        });
      } catch (const std::runtime_error& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(run(1) == "block 1024");
    CHECK(run(3) == "block 1024");
  }
}

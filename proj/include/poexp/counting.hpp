#pragma once

#include <cstddef>
#include <vector>

#include "poexp/random.hpp"
#include "poexp/sequence.hpp"

namespace poexp {

inline constexpr std::size_t kDefaultEventCap = 1'000'000;

/// Event times of N(t; λ⃗) on [0, horizon].
struct CountingPath {
  std::vector<double> event_times;
  double horizon = 0.0;
  /// The event cap was hit before the horizon; the path is incomplete.
  bool truncated = false;

  /// N(t) = #{event times <= t}.
  [[nodiscard]] std::size_t count_at(double t) const;
};

/// π_n(t) = P{N(t) = n} = Λ_n a_n(t; λ⃗). Constant rates use the Poisson formula.
[[nodiscard]] double pmf_pi(const IntensitySequence& lambda, std::size_t n, double t);

struct PmfTable {
  /// π_0(t), ..., π_K(t)
  std::vector<double> values;
  /// Upper bound for P{N(t) > K}.
  double tail_bound = 0.0;
};

/// π_n(t) for n = 0..K, with K doubled until the tail bound is below `tail_tol`, K = max_k, or
/// the next doubling would cost more than about 2e8 rate-steps (explosive or very stiff rates).
/// Needs no distinctness of the rates.
[[nodiscard]] PmfTable pmf_table(const IntensitySequence& lambda, double t, double tail_tol = 1e-14,
                                 std::size_t max_k = 4096);

/// Exact sampling by inverse transform: τ_n = -ln U / λ_n.
[[nodiscard]] CountingPath sample_counting_path(const IntensitySequence& lambda, double horizon, RandomStream& rng,
                                                std::size_t cap = kDefaultEventCap);

}  // namespace poexp

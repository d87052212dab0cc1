#pragma once

#include <cstddef>
#include <cmath>
#include <deque>
#include <functional>

namespace poexp {

/// Neumaier-compensated accumulator in long double.
class CompensatedSum {
 public:
  void add(long double x);
  [[nodiscard]] long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

struct SeriesTolerance {
  double relative = 1e-12;
  /// Consecutive small terms required before stopping.
  int calm_terms = 5;
  /// Non-decreasing run length that signals divergence...
  std::size_t divergence_window = 20;
  /// ...once past this index.
  std::size_t divergence_start = 50;
  std::size_t max_terms = 200000;
};

enum class SeriesStatus { running, converged, diverged, exhausted };

/// Decay test for alternating kernel series.
///
/// Each pushed term comes with an envelope (an upper bound for the magnitude of that term and of
/// the terms it stands for). Convergence needs `calm_terms` consecutive envelopes below
/// `relative`·|sum| and a geometric tail bound fitted to the recent envelopes below the same
/// threshold. Divergence is declared when the envelopes are non-decreasing over
/// `divergence_window` consecutive indices past `divergence_start`.
class ConvergenceMonitor {
 public:
  explicit ConvergenceMonitor(SeriesTolerance tol = {}) : tol_(tol) {}

  SeriesStatus push(long double term, long double envelope);
  [[nodiscard]] long double sum() const { return sum_.value(); }
  [[nodiscard]] std::size_t terms() const { return count_; }
  [[nodiscard]] SeriesStatus status() const { return status_; }
  /// Geometric tail estimate at the last push (inf if the envelopes are not contracting).
  [[nodiscard]] long double tail_bound() const { return tail_; }

 private:
  SeriesTolerance tol_;
  CompensatedSum sum_;
  std::deque<long double> recent_;
  std::size_t count_ = 0;
  int calm_ = 0;
  std::size_t rising_ = 0;
  long double tail_ = INFINITY;
  SeriesStatus status_ = SeriesStatus::running;
};

struct PositiveSeriesResult {
  double value = 0.0;
  bool infinite = false;
  std::size_t terms = 0;
  double error_estimate = 0.0;
};

/// Optional factorization of each term as a power-law part times a slowly varying part.
///
/// `log_power_part` is called right after each term and returns the log of its power-law part.
/// When the remainder grows at most polylogarithmically, the decay exponent is read from the
/// power-law part alone and each Richardson exponent is applied `log_order + 1` times, which
/// removes error terms N^{-q} (ln N)^j for j <= log_order.
struct PositiveSeriesHint {
  std::function<long double()> log_power_part;
  unsigned log_order = 0;
};

/// Sum of a positive series whose terms are produced in order as natural logs.
///
/// Geometric or faster decay is summed directly with a ratio tail bound. Algebraic decay
/// t_n ~ C n^{-p} is detected from terms at doubling checkpoints: p <= 1 (within 1e-3 after
/// extrapolation) reports +inf, otherwise partial sums at N·2^j are Richardson-extrapolated
/// with error exponents p-1, p, p+1, ...
PositiveSeriesResult sum_positive_series(const std::function<long double()>& next_log_term,
                                         double relative_tol = 1e-13, std::size_t max_terms = 1u << 17,
                                         const PositiveSeriesHint& hint = {});

}  // namespace poexp

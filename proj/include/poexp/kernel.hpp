#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "poexp/sequence.hpp"
#include "poexp/series.hpp"
#include "poexp/signed_log.hpp"

namespace poexp {

/// Two nodes a, b are distinct when |a - b| > kDistinctTolerance · max(|a|, |b|).
inline constexpr double kDistinctTolerance = 1e-9;

[[nodiscard]] inline double term(const IntensitySequence& seq, std::size_t n) { return seq.term(n); }

/// Λ_n = Π_{k<n} λ_k, Λ_0 = 1.
[[nodiscard]] SignedLogValue capital_lambda(const IntensitySequence& seq, std::size_t n);

/// Π_n = Π_{k<=n} (λ_k + μ_k).
[[nodiscard]] SignedLogValue capital_pi(const IntensitySequence& lambda, const IntensitySequence& mu, std::size_t n);

/// Throws DegenerateSpacing for the first pair of coinciding nodes.
void check_distinct(std::span<const double> nodes);

/// κ_{n,k} = Π_{j<=n, j!=k} (x_j - x_k)^{-1} over nodes x_0..x_n.
[[nodiscard]] SignedLogValue kappa(std::span<const double> nodes, std::size_t k);
[[nodiscard]] SignedLogValue kappa(const IntensitySequence& seq, std::size_t n, std::size_t k);

/// a_n(t) = Σ_{k<=n} κ_{n,k} e^{-x_k t} over nodes x_0..x_n.
///
/// Uses the direct compensated sum when its condition number is moderate and the
/// uniformized ODE a_n' = -x_n a_n + a_{n-1} otherwise; both agree where both are accurate.
[[nodiscard]] double a_n(std::span<const double> nodes, double t);
[[nodiscard]] double a_n(const IntensitySequence& seq, std::size_t n, double t);

struct KernelSeriesResult {
  double value = 0.0;
  SeriesStatus status = SeriesStatus::running;
  std::size_t terms = 0;

  [[nodiscard]] bool converged() const { return status == SeriesStatus::converged; }
};

/// Σ_{n>=k} W_n κ_{n,k}(x) g_n with W_n = Π_{j<n} w_j, under the decay test of ConvergenceMonitor.
///
/// Throws DegenerateSpacing if two nodes visited by the series coincide.
[[nodiscard]] KernelSeriesResult kappa_series(const Sequence& weights, const Sequence& nodes, const Sequence& g,
                                              std::size_t k, SeriesTolerance tol = {});

/// b_k(λ⃗, μ⃗; z) = Σ_{n>=k} Λ_n κ_{n,k}(λ⃗ + zμ⃗).
[[nodiscard]] KernelSeriesResult b_k(const IntensitySequence& lambda, const IntensitySequence& mu, double z,
                                     std::size_t k, SeriesTolerance tol = {});

/// max over m <= n of |Σ_k κ_{n,k} x_k^m - [m == n](-1)^n|, nodes x_0..x_n.
[[nodiscard]] double check_vandermonde(std::span<const double> nodes);
[[nodiscard]] double check_vandermonde(const IntensitySequence& seq, std::size_t n);

[[nodiscard]] inline bool is_non_explosive(const IntensitySequence& seq) { return seq.is_non_explosive(); }

/// Transient solution of the pure-birth system with killing
///
///   u_0' = -x_0 u_0,   u_n' = -x_n u_n + w_{n-1} u_{n-1},   n = 1..K,
///
/// started from u(0) = e_0, so that u_n(t) = W_n a_n(t; x) with W_n = Π_{j<n} w_j. Mass that
/// leaves state K through w_K accumulates in a sink; when x_n >= w_n beyond K the sink bounds
/// Σ_{n>K} u_n. Optional integrals v_n(t) = ∫_0^t u_n are carried along.
///
/// Evaluation is by uniformization: every arithmetic step combines nonnegative numbers, so
/// there is no cancellation however close or numerous the nodes are.
class KernelPropagator {
 public:
  KernelPropagator(std::vector<double> rates, std::vector<double> weights, bool with_integrals = false);

  /// Advance the state by dt >= 0.
  void advance(double dt);

  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] std::size_t size() const { return x_.size(); }
  [[nodiscard]] std::span<const double> state() const { return u_; }
  [[nodiscard]] std::span<const double> integrals() const { return v_; }
  [[nodiscard]] double sink() const { return sink_; }
  [[nodiscard]] double sink_integral() const { return sink_int_; }

  /// Demand per-component relative accuracy, including components far from the initial state.
  void set_full_reach(bool on) { full_reach_ = on; }

 private:
  void step_chunk(double tau);

  std::vector<double> x_;
  std::vector<double> w_;
  bool with_integrals_;
  bool full_reach_ = false;
  double q_ = 0.0;
  double time_ = 0.0;
  std::vector<double> u_, v_;
  double sink_ = 0.0, sink_int_ = 0.0;
};

}  // namespace poexp

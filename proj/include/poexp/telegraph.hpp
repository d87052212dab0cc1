#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poexp/counting.hpp"
#include "poexp/jump_law.hpp"
#include "poexp/poexp_distribution.hpp"
#include "poexp/random.hpp"
#include "poexp/sequence.hpp"
#include "poexp/series.hpp"

namespace poexp {

/// Parameters of one pattern σ = ⟨c⃗, r⃗, R⃗, μ⃗, λ⃗⟩.
///
/// In a pattern with n shocks so far the process drifts at slope c(n); the next shock arrives at
/// rate λ_n and jumps by a draw of r(n); the pattern ends at rate μ_n with a jump drawn from R(n).
struct PatternParams {
  PatternParams(Sequence c, JumpLawSequence r_laws, JumpLawSequence R_laws, IntensitySequence mu,
                IntensitySequence lambda);

  Sequence c;
  JumpLawSequence r_laws;
  JumpLawSequence R_laws;
  IntensitySequence mu;
  IntensitySequence lambda;

  [[nodiscard]] Sequence r_mean() const { return r_laws.means(); }
  [[nodiscard]] Sequence R_mean() const { return R_laws.means(); }
  /// Law of the pattern's holding time.
  [[nodiscard]] PoExpParams holding_law() const { return {lambda, mu}; }
};

enum class EventKind { shock, pattern_switch };

[[nodiscard]] inline const char* to_string(EventKind k) { return k == EventKind::shock ? "shock" : "switch"; }

struct PathSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double slope = 0.0;
  int state = 0;
  std::size_t shock_count = 0;
  std::size_t epoch = 0;
};

struct PathEvent {
  double time = 0.0;
  double size = 0.0;
  EventKind kind = EventKind::shock;
  /// State in force just before the event.
  int state = 0;
  /// Shocks earlier in the same epoch; the event's jump law is indexed by this count.
  std::size_t shock_count = 0;
  std::size_t epoch = 0;
};

/// One realization of X = 𝕃 + 𝕁 on [0, horizon].
struct ProcessPath {
  int initial_state = 0;
  double horizon = 0.0;
  std::vector<PathSegment> segments;
  std::vector<PathEvent> events;

  /// Drift accumulated over [0, t] plus every jump at times <= t.
  [[nodiscard]] double value_at(double t) const;
  /// Drift part 𝕃(t) alone.
  [[nodiscard]] double drift_at(double t) const;
  [[nodiscard]] std::optional<double> first_switch_time() const;
  /// State ε(t) (right-continuous).
  [[nodiscard]] int state_at(double t) const;
};

/// Simulate with competing clocks; shocks and epochs reset as described on PatternParams.
/// Throws ExplosionCap after `cap` events.
[[nodiscard]] ProcessPath simulate_path(const PatternParams& s0, const PatternParams& s1, int initial_state,
                                        double horizon, RandomStream& rng, std::size_t cap = kDefaultEventCap);

/// ρ(n) = Σ_{k<n} r̄(k)
[[nodiscard]] double rho(const PatternParams& s, std::size_t n);

/// Δ(n) = c(n) + λ_n r̄(n) + μ_n R̄(n)
[[nodiscard]] double delta(const PatternParams& s, std::size_t n);
[[nodiscard]] Sequence delta_sequence(const PatternParams& s);

struct MartingaleReport {
  bool martingale = true;
  /// First (state, n) with Δ(n) != 0, if any.
  std::optional<std::pair<int, std::size_t>> violation;
  /// Whether the violation lies beyond the explicitly checked range.
  bool in_tail = false;
};

/// |Δ(n)| <= tol·max(1, |c(n)| + |λ_n r̄(n)| + |μ_n R̄(n)|) for n <= n_check in both states, and
/// every residue class of the tail of Δ vanishing identically.
[[nodiscard]] MartingaleReport is_martingale(const PatternParams& s0, const PatternParams& s1,
                                             std::size_t n_check = 1000, double tol = 1e-12);

/// 𝔪(t|σ) = E X(t ∧ T) for a single pattern started afresh.
///
/// Series form Σ_k (1 - e^{-x_k t})/x_k D_k with D_k = Σ_{n>=k} Δ(n) Λ_n κ_{n,k}(x), x = λ⃗+μ⃗;
/// when some D_k fails the decay test the finite-state form
///   Σ_n ρ(n) u_n(t) + Σ_n ((R̄(n) + ρ(n)) μ_n + c(n)) v_n(t),
/// u_n = Λ_n a_n(t; x), v_n = ∫_0^t u_n, is used instead.
class MeanSource {
 public:
  explicit MeanSource(const PatternParams& s, SeriesTolerance tol = {});

  [[nodiscard]] bool series_available() const { return series_ok_; }
  [[nodiscard]] const std::string& series_failure() const { return failure_; }

  [[nodiscard]] Evaluation operator()(double t) const;
  /// Throws SeriesDiverged when unavailable.
  [[nodiscard]] double series(double t) const;
  [[nodiscard]] double fallback(double t) const { return fallback_grid({t}).front(); }
  /// Σ_n Δ(n) v_n(t), a third equivalent form.
  [[nodiscard]] double delta_form(double t) const { return delta_form_grid({t}).front(); }

  [[nodiscard]] std::vector<double> grid(const std::vector<double>& times, Method* used = nullptr) const;
  [[nodiscard]] std::vector<double> fallback_grid(const std::vector<double>& times) const;
  [[nodiscard]] std::vector<double> delta_form_grid(const std::vector<double>& times) const;

 private:
  PatternParams s_;
  bool series_ok_ = false;
  std::string failure_;
  std::vector<double> d_;
  std::vector<double> x_;
};

[[nodiscard]] inline Evaluation mean_source(const PatternParams& s, double t) { return MeanSource(s)(t); }

struct MeanEstimate {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> standard_error;
};

/// Monte Carlo mean of X(t) from `n_paths` paths; path i uses RandomStream(seed, i).
[[nodiscard]] MeanEstimate empirical_mean(const PatternParams& s0, const PatternParams& s1, int initial_state,
                                          const std::vector<double>& t_grid, std::size_t n_paths,
                                          std::uint64_t seed, std::size_t workers = default_workers());

}  // namespace poexp

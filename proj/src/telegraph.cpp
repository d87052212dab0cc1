#include "poexp/telegraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "poexp/errors.hpp"
#include "poexp/kernel.hpp"

namespace poexp {

PatternParams::PatternParams(Sequence c_, JumpLawSequence r_laws_, JumpLawSequence R_laws_, IntensitySequence mu_,
                             IntensitySequence lambda_)
    : c(std::move(c_)),
      r_laws(std::move(r_laws_)),
      R_laws(std::move(R_laws_)),
      mu(std::move(mu_)),
      lambda(std::move(lambda_)) {}

// ---------------------------------------------------------------------------
// ProcessPath

namespace {

// Drift over [0, t]. Consecutive segments with equal slope are integrated as one run, so a
// constant slope c gives exactly c·t.
double integrate_drift(const std::vector<PathSegment>& segments, double t) {
  double total = 0.0;
  bool open = false;
  double run_slope = 0.0, run_start = 0.0, run_end = 0.0;
  for (const auto& seg : segments) {
    if (seg.t_start >= t) break;
    const double end = std::min(seg.t_end, t);
    if (open && seg.slope == run_slope) {
      run_end = end;
      continue;
    }
    if (open) total += run_slope * (run_end - run_start);
    open = true;
    run_slope = seg.slope;
    run_start = seg.t_start;
    run_end = end;
  }
  if (open) total += run_slope * (run_end - run_start);
  return total;
}

}  // namespace

double ProcessPath::drift_at(double t) const { return integrate_drift(segments, t); }

double ProcessPath::value_at(double t) const {
  double x = integrate_drift(segments, t);
  for (const auto& e : events) {
    if (e.time > t) break;
    x += e.size;
  }
  return x;
}

std::optional<double> ProcessPath::first_switch_time() const {
  for (const auto& e : events) {
    if (e.kind == EventKind::pattern_switch) return e.time;
  }
  return std::nullopt;
}

int ProcessPath::state_at(double t) const {
  int s = initial_state;
  for (const auto& e : events) {
    if (e.time > t) break;
    if (e.kind == EventKind::pattern_switch) s = 1 - s;
  }
  return s;
}

ProcessPath simulate_path(const PatternParams& s0, const PatternParams& s1, int initial_state, double horizon,
                          RandomStream& rng, std::size_t cap) {
  if (initial_state != 0 && initial_state != 1) throw InvalidArgument("initial state must be 0 or 1");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  const PatternParams* pattern[2] = {&s0, &s1};
  ProcessPath path;
  path.initial_state = initial_state;
  path.horizon = horizon;

  double t = 0.0;
  int state = initial_state;
  std::size_t n = 0;
  std::size_t epoch = 0;
  for (;;) {
    const PatternParams& s = *pattern[state];
    const double slope = s.c.term(n);
    const double shock = rng.exponential(s.lambda.term(n));
    const double fire = rng.exponential(s.mu.term(n));
    const double dt = std::min(shock, fire);
    if (t + dt >= horizon) {
      path.segments.push_back({t, horizon, slope, state, n, epoch});
      break;
    }
    path.segments.push_back({t, t + dt, slope, state, n, epoch});
    t += dt;
    if (path.events.size() >= cap) throw ExplosionCap(cap);
    if (fire <= shock) {
      path.events.push_back({t, s.R_laws.at(n).sample(rng), EventKind::pattern_switch, state, n, epoch});
      state = 1 - state;
      n = 0;
      ++epoch;
    } else {
      path.events.push_back({t, s.r_laws.at(n).sample(rng), EventKind::shock, state, n, epoch});
      ++n;
    }
  }
  return path;
}

// ---------------------------------------------------------------------------
// Drift functionals

double rho(const PatternParams& s, std::size_t n) {
  CompensatedSum acc;
  for (std::size_t k = 0; k < n; ++k) acc.add(s.r_laws.at(k).mean());
  return static_cast<double>(acc.value());
}

double delta(const PatternParams& s, std::size_t n) {
  return s.c.term(n) + s.lambda.term(n) * s.r_laws.at(n).mean() + s.mu.term(n) * s.R_laws.at(n).mean();
}

Sequence delta_sequence(const PatternParams& s) {
  return s.c + s.lambda.sequence() * s.r_mean() + s.mu.sequence() * s.R_mean();
}

namespace {

double delta_envelope(const PatternParams& s, std::size_t n) {
  return std::abs(s.c.term(n)) + std::abs(s.lambda.term(n) * s.r_laws.at(n).mean()) +
         std::abs(s.mu.term(n) * s.R_laws.at(n).mean());
}

bool delta_vanishes(const PatternParams& s, std::size_t n, double tol) {
  return std::abs(delta(s, n)) <= tol * std::max(1.0, delta_envelope(s, n));
}

// First index >= from in residue class r (mod period) where Δ does not vanish, if any.
// A residue of the tail is accepted as identically zero when it cancels symbolically, or when it
// vanishes at sample points spread over six decades (more points than any rational residue of
// the supported tail families could have as zeros).
std::optional<std::size_t> tail_violation(const PatternParams& s, const TailRule& tail, std::size_t r,
                                          std::size_t from, double tol) {
  if (tail.residue(r).is_zero()) return std::nullopt;
  const std::size_t p = tail.period();
  const std::size_t first = from + (r + p - from % p) % p;
  std::vector<std::size_t> samples;
  for (std::size_t m = 0; m < 32; ++m) samples.push_back(first + m * p);
  for (std::size_t scale = 100; scale <= 1'000'000; scale *= 10) samples.push_back(first + scale * p);
  for (std::size_t n : samples) {
    if (delta_vanishes(s, n, tol)) continue;
    for (std::size_t k = first; k <= n; k += p) {
      if (!delta_vanishes(s, k, tol)) return k;
    }
  }
  return std::nullopt;
}

}  // namespace

MartingaleReport is_martingale(const PatternParams& s0, const PatternParams& s1, std::size_t n_check, double tol) {
  MartingaleReport report;
  const PatternParams* pattern[2] = {&s0, &s1};
  std::optional<std::pair<int, std::size_t>> best;
  bool best_in_tail = false;
  for (int state = 0; state < 2; ++state) {
    const PatternParams& s = *pattern[state];
    const Sequence d = delta_sequence(s);
    const std::size_t explicit_end = std::max(n_check + 1, d.prefix().size());
    std::optional<std::size_t> first;
    for (std::size_t n = 0; n < explicit_end && !first; ++n) {
      if (!delta_vanishes(s, n, tol)) first = n;
    }
    bool in_tail = false;
    if (!first) {
      for (std::size_t r = 0; r < d.tail().period(); ++r) {
        const auto v = tail_violation(s, d.tail(), r, explicit_end, tol);
        if (v && (!first || *v < *first)) first = v;
      }
      in_tail = first.has_value();
    }
    if (first && !best) {
      best = std::make_pair(state, *first);
      best_in_tail = in_tail;
    }
  }
  report.martingale = !best;
  report.violation = best;
  report.in_tail = best_in_tail;
  return report;
}

// ---------------------------------------------------------------------------
// MeanSource

namespace {

constexpr std::size_t kMaxStates = 4096;

// Σ_n a_n u_n(t) + Σ_n b_n v_n(t) on an increasing grid, u_n = Λ_n a_n(t; λ⃗+μ⃗), v_n = ∫u_n.
// The number of states doubles until the sink bound on the omitted terms is negligible.
template <class CoefU, class CoefV>
std::vector<double> finite_state_form(const PatternParams& s, const std::vector<double>& times, CoefU coef_u,
                                      CoefV coef_v) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
      throw InvalidArgument("time grid must be nonnegative and nondecreasing");
    }
  }
  const Sequence x = s.lambda.sequence() + s.mu.sequence();
  for (std::size_t K = 32;; K = std::min(2 * K, kMaxStates)) {
    std::vector<double> a(4 * K + 1), b(4 * K + 1);
    for (std::size_t n = 0; n <= 4 * K; ++n) {
      a[n] = coef_u(n);
      b[n] = coef_v(n);
    }
    KernelPropagator prop(x.terms(K + 1), s.lambda.terms(K + 1), true);
    std::vector<double> out;
    double scale = 0.0;
    double t_prev = 0.0;
    for (double t : times) {
      prop.advance(t - t_prev);
      t_prev = t;
      CompensatedSum acc;
      const auto u = prop.state();
      const auto v = prop.integrals();
      double abs_sum = 0.0;
      for (std::size_t n = 0; n <= K; ++n) {
        acc.add(static_cast<long double>(a[n]) * u[n]);
        acc.add(static_cast<long double>(b[n]) * v[n]);
        abs_sum += std::abs(a[n] * u[n]) + std::abs(b[n] * v[n]);
      }
      scale = std::max(scale, abs_sum);
      out.push_back(static_cast<double>(acc.value()));
    }
    if (K == kMaxStates || times.empty()) return out;
    double sup_a = 0.0, sup_b = 0.0;
    for (std::size_t n = K + 1; n <= 4 * K; ++n) {
      sup_a = std::max(sup_a, std::abs(a[n]));
      sup_b = std::max(sup_b, std::abs(b[n]));
    }
    const double tail = prop.sink() * sup_a + prop.sink_integral() * sup_b;
    if (tail <= 1e-14 * scale || tail == 0.0) return out;
  }
}

}  // namespace

MeanSource::MeanSource(const PatternParams& s, SeriesTolerance tol) : s_(s) {
  const Sequence x = s_.lambda.sequence() + s_.mu.sequence();
  const Sequence d = delta_sequence(s_);
  constexpr std::size_t kMaxCoefficients = 2000;
  ConvergenceMonitor outer(tol);
  std::ostringstream why;
  try {
    for (std::size_t k = 0; k < kMaxCoefficients; ++k) {
      const KernelSeriesResult r = kappa_series(s_.lambda.sequence(), x, d, k, tol);
      if (!r.converged()) {
        why << "D_" << k << (r.status == SeriesStatus::diverged ? " diverges" : " did not converge");
        break;
      }
      const double xk = x.term(k);
      d_.push_back(r.value);
      x_.push_back(xk);
      if (outer.push(r.value / xk, std::abs(r.value) / xk) != SeriesStatus::running) break;
    }
  } catch (const DegenerateSpacing& e) {
    why << e.what();
  }
  if (why.str().empty() && outer.status() != SeriesStatus::converged) why << "series over D_k does not converge";
  failure_ = why.str();
  series_ok_ = failure_.empty();
  if (!series_ok_) {
    d_.clear();
    x_.clear();
  }
}

double MeanSource::series(double t) const {
  if (!series_ok_) throw SeriesDiverged(failure_);
  if (!(t >= 0.0)) throw InvalidArgument("mean_source: t must be nonnegative");
  if (t == 0.0) return 0.0;
  CompensatedSum acc;
  for (std::size_t k = 0; k < d_.size(); ++k) acc.add(-std::expm1(-x_[k] * t) / x_[k] * d_[k]);
  return static_cast<double>(acc.value());
}

Evaluation MeanSource::operator()(double t) const {
  if (series_ok_) return {series(t), Method::series};
  return {fallback(t), Method::fallback};
}

std::vector<double> MeanSource::grid(const std::vector<double>& times, Method* used) const {
  if (used) *used = series_ok_ ? Method::series : Method::fallback;
  if (!series_ok_) return fallback_grid(times);
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(series(t));
  return out;
}

std::vector<double> MeanSource::fallback_grid(const std::vector<double>& times) const {
  std::vector<double> rho_cache{0.0};
  auto rho_at = [&](std::size_t n) {
    while (rho_cache.size() <= n) rho_cache.push_back(rho_cache.back() + s_.r_laws.at(rho_cache.size() - 1).mean());
    return rho_cache[n];
  };
  return finite_state_form(
      s_, times, rho_at,
      [&](std::size_t n) { return (s_.R_laws.at(n).mean() + rho_at(n)) * s_.mu.term(n) + s_.c.term(n); });
}

std::vector<double> MeanSource::delta_form_grid(const std::vector<double>& times) const {
  return finite_state_form(
      s_, times, [](std::size_t) { return 0.0; }, [&](std::size_t n) { return delta(s_, n); });
}

// ---------------------------------------------------------------------------
// Monte Carlo

MeanEstimate empirical_mean(const PatternParams& s0, const PatternParams& s1, int initial_state,
                            const std::vector<double>& t_grid, std::size_t n_paths, std::uint64_t seed,
                            std::size_t workers) {
  if (n_paths < 2) throw InvalidArgument("empirical_mean needs at least two paths");
  if (t_grid.empty()) throw InvalidArgument("empirical_mean needs a nonempty time grid");
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
  if (!(horizon > 0.0)) throw InvalidArgument("empirical_mean needs a positive time");
  const auto blocks = run_blocks<std::vector<RunningStats>>(n_paths, workers, [&](std::size_t b, std::size_t e) {
    std::vector<RunningStats> stats(t_grid.size());
    for (std::size_t i = b; i < e; ++i) {
      RandomStream rng(seed, i);
      const ProcessPath path = simulate_path(s0, s1, initial_state, horizon, rng);
      for (std::size_t j = 0; j < t_grid.size(); ++j) stats[j].add(path.value_at(t_grid[j]));
    }
    return stats;
  });
  std::vector<RunningStats> total(t_grid.size());
  for (const auto& blk : blocks) {
    for (std::size_t j = 0; j < total.size(); ++j) total[j].merge(blk[j]);
  }
  MeanEstimate out;
  out.times = t_grid;
  for (const auto& s : total) {
    out.mean.push_back(s.mean);
    out.standard_error.push_back(s.standard_error());
  }
  return out;
}

}  // namespace poexp

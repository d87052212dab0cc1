#include "poexp/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "poexp/errors.hpp"
#include "poexp/kernel.hpp"
#include "poexp/poexp_distribution.hpp"

namespace poexp {

namespace {

void check_jump_supports(const JumpLawSequence& laws, int state, const char* name) {
  auto check = [&](const JumpLaw& l) {
    if (!(l.support_min() > -1.0)) {
      std::ostringstream os;
      os << "state " << state << ": " << name << " jump atoms must exceed -1 (found " << l.support_min() << ")";
      throw InvalidArgument(os.str());
    }
  };
  for (const auto& l : laws.prefix()) check(l);
  for (const auto& l : laws.tail()) check(l);
}

PatternParams with_intensities(const PatternParams& s, IntensitySequence lambda, IntensitySequence mu) {
  return {s.c, s.r_laws, s.R_laws, std::move(mu), std::move(lambda)};
}

}  // namespace

MarketScenario::MarketScenario(PatternParams s0, PatternParams s1, double y0, double y1, double S0_)
    : sigma{std::move(s0), std::move(s1)}, y{y0, y1}, S0(S0_) {
  for (int i = 0; i < 2; ++i) {
    check_jump_supports(sigma[i].r_laws, i, "r");
    check_jump_supports(sigma[i].R_laws, i, "R");
    if (!(y[i] >= 0.0) || !std::isfinite(y[i])) throw InvalidArgument("interest rates must be finite and >= 0");
  }
  if (!(S0 > 0.0) || !std::isfinite(S0)) throw InvalidArgument("S0 must be positive");
}

PatternParams MarketScenario::discounted(int i) const {
  const PatternParams& s = sigma[i];
  return {s.c - Sequence::constant(y[i]), s.r_laws, s.R_laws, s.mu, s.lambda};
}

// ---------------------------------------------------------------------------
// Paths

double MarketPath::log_bond_at(double t) const {
  // Integrated per run of equal state, so a constant rate y gives exactly y·t.
  double total = 0.0;
  bool open = false;
  int run_state = 0;
  double run_start = 0.0, run_end = 0.0;
  for (const auto& seg : path.segments) {
    if (seg.t_start >= t) break;
    const double end = std::min(seg.t_end, t);
    if (open && (seg.state == run_state || y[seg.state] == y[run_state])) {
      run_end = end;
      continue;
    }
    if (open) total += y[run_state] * (run_end - run_start);
    open = true;
    run_state = seg.state;
    run_start = seg.t_start;
    run_end = end;
  }
  if (open) total += y[run_state] * (run_end - run_start);
  return total;
}

double MarketPath::log_stock_at(double t) const {
  double x = std::log(S0) + path.drift_at(t);
  for (const auto& e : path.events) {
    if (e.time > t) break;
    x += std::log1p(e.size);
  }
  return x;
}

MarketPath simulate_market_path(const MarketScenario& m, int initial_state, double horizon, RandomStream& rng,
                                std::size_t cap) {
  MarketPath p;
  p.path = simulate_path(m.sigma[0], m.sigma[1], initial_state, horizon, rng, cap);
  p.y = m.y;
  p.S0 = m.S0;
  return p;
}

std::vector<double> discounted_price(const MarketPath& p, const std::vector<double>& times) {
  MarketPath shifted = p;
  for (auto& seg : shifted.path.segments) seg.slope -= p.y[seg.state];
  shifted.y = {0.0, 0.0};
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(shifted.stock_at(t));
  return out;
}

// ---------------------------------------------------------------------------
// Esscher transform

EsscherParams esscher_derive(const MarketScenario& m, const std::array<Sequence, 2>& r_star,
                             const std::array<Sequence, 2>& R_star) {
  auto derive = [&](int i) {
    const PatternParams& s = m.sigma[i];
    const Sequence one_r = 1.0 + r_star[i];
    const Sequence one_R = 1.0 + R_star[i];
    if (auto bad = one_r.first_nonpositive()) {
      throw InvalidGirsanov("r*(" + std::to_string(*bad) + ") <= -1 in state " + std::to_string(i));
    }
    if (auto bad = one_R.first_nonpositive()) {
      throw InvalidGirsanov("R*(" + std::to_string(*bad) + ") <= -1 in state " + std::to_string(i));
    }
    return EsscherState{r_star[i], R_star[i], -(s.lambda.sequence() * r_star[i]) - s.mu.sequence() * R_star[i],
                        IntensitySequence(s.lambda.sequence() * one_r), IntensitySequence(s.mu.sequence() * one_R)};
  };
  return EsscherParams{{derive(0), derive(1)}};
}

MarketScenario starred_scenario(const MarketScenario& m, const EsscherParams& e) {
  return {with_intensities(m.sigma[0], e.state[0].lambda_star, e.state[0].mu_star),
          with_intensities(m.sigma[1], e.state[1].lambda_star, e.state[1].mu_star), m.y[0], m.y[1], m.S0};
}

double log_radon_nikodym(const ProcessPath& path, const EsscherParams& e, double t) {
  CompensatedSum acc;
  for (const auto& seg : path.segments) {
    if (seg.t_start >= t) break;
    const double len = std::min(seg.t_end, t) - seg.t_start;
    acc.add(e.state[seg.state].c_star.term(seg.shock_count) * len);
  }
  for (const auto& ev : path.events) {
    if (ev.time > t) break;
    const EsscherState& s = e.state[ev.state];
    const double jump = ev.kind == EventKind::shock ? s.r_star.term(ev.shock_count) : s.R_star.term(ev.shock_count);
    acc.add(std::log1p(jump));
  }
  return static_cast<double>(acc.value());
}

std::vector<double> radon_nikodym(const ProcessPath& path, const EsscherParams& e, const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(std::exp(log_radon_nikodym(path, e, t)));
  return out;
}

// ---------------------------------------------------------------------------
// Arbitrage

namespace {

enum class Side { below, above };

bool one_sided(const JumpLaw& l, Side side) {
  return side == Side::below ? l.support_max() < 0.0 : l.support_min() > 0.0;
}

bool trend_matches(double c, Side side) { return side == Side::below ? c < 0.0 : c > 0.0; }

const char* side_name(Side side) { return side == Side::below ? "support-" : "support+"; }

}  // namespace

ArbitrageReport detect_arbitrage(const MarketScenario& m, std::size_t n_check) {
  ArbitrageReport report;
  for (int i = 0; i < 2; ++i) {
    const PatternParams s = m.discounted(i);
    const std::size_t explicit_end =
        std::max({n_check + 1, s.c.prefix().size(), s.r_laws.prefix().size(), s.R_laws.prefix().size()});
    for (Side side : {Side::below, Side::above}) {
      auto violates = [&](std::size_t n) {
        return trend_matches(s.c.term(n), side) && one_sided(s.r_laws.at(n), side) &&
               one_sided(s.R_laws.at(n), side);
      };
      for (std::size_t n = 0; n < explicit_end; ++n) {
        if (violates(n)) report.violations.push_back({i, n, side_name(side), false});
      }
      // Beyond the explicit range every index falls in a residue class where the laws repeat and
      // the trend is one rational function; past that function's root bound its sign is fixed.
      const std::size_t period =
          std::lcm(s.c.tail().period(), std::lcm(s.r_laws.tail().size(), s.R_laws.tail().size()));
      for (std::size_t r = 0; r < period; ++r) {
        const std::size_t first = explicit_end + (r + period - explicit_end % period) % period;
        if (!one_sided(s.r_laws.at(first), side) || !one_sided(s.R_laws.at(first), side)) continue;
        const RationalFunction& f = s.c.tail().residue(r % s.c.tail().period());
        const double bound = std::min(f.bound(), 1e7);
        std::optional<std::size_t> hit;
        std::size_t n = first;
        for (; static_cast<double>(n) <= bound + 1.0; n += period) {
          if (violates(n)) {
            hit = n;
            break;
          }
        }
        if (!hit && f.eventual_sign() == (side == Side::below ? -1 : 1)) hit = n;
        if (hit) report.violations.push_back({i, *hit, side_name(side), true});
      }
    }
  }
  report.arbitrage_free = report.violations.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Martingale measure

EsscherParams construct_martingale_measure(const MarketScenario& m, const std::array<Sequence, 2>& r_star_choice) {
  std::array<Sequence, 2> R_star;
  for (int i = 0; i < 2; ++i) {
    const PatternParams s = m.discounted(i);
    const Sequence rbar = s.r_mean();
    const Sequence Rbar = s.R_mean();
    const Sequence num = s.c + s.lambda.sequence() * (1.0 + r_star_choice[i]) * rbar;
    const Sequence den = s.mu.sequence() * Rbar;

    auto scale_at = [&](std::size_t n) {
      return std::abs(s.c.term(n)) + std::abs(s.lambda.term(n) * (1.0 + r_star_choice[i].term(n)) * rbar.term(n));
    };
    auto num_vanishes = [&](std::size_t n) { return std::abs(num.term(n)) <= 1e-12 * std::max(1.0, scale_at(n)); };

    const std::size_t L = std::max(num.prefix().size(), den.prefix().size());
    std::vector<double> prefix(L);
    for (std::size_t n = 0; n < L; ++n) {
      if (Rbar.term(n) == 0.0) {
        if (!num_vanishes(n)) throw DivisionByZero(i, n);
        prefix[n] = 0.0;
      } else {
        prefix[n] = -1.0 - num.term(n) / den.term(n);
      }
    }
    const std::size_t period = std::lcm(num.tail().period(), den.tail().period());
    const TailRule num_tail = num.tail().with_period(period);
    const TailRule den_tail = den.tail().with_period(period);
    std::vector<RationalFunction> residues;
    for (std::size_t r = 0; r < period; ++r) {
      if (den_tail.residue(r).is_zero()) {
        const std::size_t first = L + (r + period - L % period) % period;
        for (std::size_t k = 0; k < 64; ++k) {
          if (!num_vanishes(first + k * period)) throw DivisionByZero(i, first + k * period);
        }
        residues.emplace_back();
      } else {
        residues.push_back(RationalFunction(Polynomial::constant(-1.0)) - num_tail.residue(r) / den_tail.residue(r));
      }
    }
    R_star[i] = Sequence(std::move(prefix), TailRule(std::move(residues)));
    // A zero of R̄ inside the tail of a nonzero residue.
    for (std::size_t n = L; n < L + 4 * period; ++n) {
      if (Rbar.term(n) == 0.0 && !num_vanishes(n)) throw DivisionByZero(i, n);
    }
    if (auto bad = (1.0 + R_star[i]).first_nonpositive()) throw NoValidMeasure(i, *bad);
  }
  return esscher_derive(m, r_star_choice, R_star);
}

// ---------------------------------------------------------------------------
// Verification

namespace {

bool first_epoch_event(const ProcessPath& p, double t, std::size_t n) {
  if (auto sw = p.first_switch_time(); sw && *sw <= t) return false;
  std::size_t shocks = 0;
  for (const auto& e : p.events) {
    if (e.time > t) break;
    if (e.kind == EventKind::shock) ++shocks;
  }
  return shocks == n;
}

struct VerifyBlock {
  std::vector<RunningStats> joint;       // [t][n]
  std::vector<RunningStats> z;           // [t]
  std::vector<RunningStats> discounted;  // [t]
};

double z_score(double a, double b, double se) {
  if (se > 0.0) return std::abs(a - b) / se;
  return std::abs(a - b) <= 1e-12 ? 0.0 : INFINITY;
}

}  // namespace

MeasureChangeReport verify_measure_change(const MarketScenario& m, const EsscherParams& e, int initial_state,
                                          const std::vector<double>& t_grid, std::size_t n_max, std::size_t n_paths,
                                          std::uint64_t seed, std::size_t workers) {
  if (t_grid.empty() || n_paths < 2) throw InvalidArgument("verify_measure_change needs times and >= 2 paths");
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
  const std::size_t T = t_grid.size();
  const std::size_t N = n_max + 1;
  const MarketScenario star = starred_scenario(m, e);

  auto run = [&](const MarketScenario& sc, bool reweight, std::uint64_t s) {
    auto blocks = run_blocks<VerifyBlock>(n_paths, workers, [&](std::size_t b, std::size_t end) {
      VerifyBlock blk{std::vector<RunningStats>(T * N), std::vector<RunningStats>(T), std::vector<RunningStats>(T)};
      for (std::size_t i = b; i < end; ++i) {
        RandomStream rng(s, i);
        const MarketPath p = simulate_market_path(sc, initial_state, horizon, rng);
        for (std::size_t j = 0; j < T; ++j) {
          const double t = t_grid[j];
          const double w = reweight ? std::exp(log_radon_nikodym(p.path, e, t)) : 1.0;
          for (std::size_t n = 0; n < N; ++n) blk.joint[j * N + n].add(first_epoch_event(p.path, t, n) ? w : 0.0);
          blk.z[j].add(w);
          blk.discounted[j].add(w * p.discounted_at(t));
        }
      }
      return blk;
    });
    VerifyBlock total{std::vector<RunningStats>(T * N), std::vector<RunningStats>(T), std::vector<RunningStats>(T)};
    for (const auto& blk : blocks) {
      for (std::size_t k = 0; k < T * N; ++k) total.joint[k].merge(blk.joint[k]);
      for (std::size_t j = 0; j < T; ++j) {
        total.z[j].merge(blk.z[j]);
        total.discounted[j].merge(blk.discounted[j]);
      }
    }
    return total;
  };

  const VerifyBlock under_p = run(m, true, seed);
  const VerifyBlock under_star = run(star, false, splitmix64(seed) + 1);
  // Coinciding λ*_n + μ*_n (common when λ*, μ* come out constant) leave no analytic column.
  std::optional<PoExpParams> law;
  try {
    law.emplace(e.state[initial_state].lambda_star, e.state[initial_state].mu_star);
  } catch (const DegenerateSpacing&) {
  }

  MeasureChangeReport report;
  for (std::size_t j = 0; j < T; ++j) {
    for (std::size_t n = 0; n < N; ++n) {
      MeasureChangeRow row;
      row.t = t_grid[j];
      row.n = n;
      row.reweighted = under_p.joint[j * N + n].mean;
      row.reweighted_se = under_p.joint[j * N + n].standard_error();
      row.direct = under_star.joint[j * N + n].mean;
      row.direct_se = under_star.joint[j * N + n].standard_error();
      report.max_z = std::max(report.max_z, z_score(row.reweighted, row.direct,
                                                    std::hypot(row.reweighted_se, row.direct_se)));
      if (law) {
        row.analytic = joint_survivor(*law, row.t, n);
        report.max_z = std::max({report.max_z, z_score(row.reweighted, row.analytic, row.reweighted_se),
                                 z_score(row.direct, row.analytic, row.direct_se)});
      } else {
        row.analytic = NAN;
      }
      report.rows.push_back(row);
    }
    MeasureChangeTimeRow tr;
    tr.t = t_grid[j];
    tr.z_mean = under_p.z[j].mean;
    tr.z_se = under_p.z[j].standard_error();
    tr.discounted_direct = under_star.discounted[j].mean;
    tr.discounted_direct_se = under_star.discounted[j].standard_error();
    tr.discounted_reweighted = under_p.discounted[j].mean;
    tr.discounted_reweighted_se = under_p.discounted[j].standard_error();
    report.max_z_mean = std::max(report.max_z_mean, z_score(tr.z_mean, 1.0, tr.z_se));
    report.times.push_back(tr);
  }
  return report;
}

}  // namespace poexp

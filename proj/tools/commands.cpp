#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csv.hpp"
#include "poexp/errors.hpp"
#include "poexp/market.hpp"
#include "poexp/mean_equations.hpp"
#include "poexp/poexp_distribution.hpp"
#include "poexp/telegraph.hpp"

namespace poexp::cli {

namespace {

void check_simulation(const SimulationConfig& s) {
  if (!(s.horizon > 0.0)) throw ConfigError("simulation.horizon: must be > 0");
  if (s.n_paths < 2) throw ConfigError("simulation.n_paths: must be >= 2");
  if (s.step < 0.0) throw ConfigError("simulation.step: must be >= 0");
  if (s.times.empty()) throw ConfigError("simulation.times: must not be empty");
  for (double t : s.times) {
    if (!(t > 0.0) || t > s.horizon) throw ConfigError("simulation.times: every time must lie in (0, horizon]");
  }
  if (!std::is_sorted(s.times.begin(), s.times.end())) throw ConfigError("simulation.times: must be increasing");
}

double z_score(double a, double b, double se) {
  if (se > 0.0) return std::abs(a - b) / se;
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)) ? 0.0 : INFINITY;
}

/// Value on a uniform grid, exact at grid points and linear in between.
double on_uniform_grid(const std::vector<double>& values, double step, double t) {
  const double x = t / step;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) return values[static_cast<std::size_t>(nearest)];
  const auto i = std::min(static_cast<std::size_t>(x), values.size() - 2);
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

MarketScenario build_market(const ScenarioConfig& cfg) {
  if (!cfg.market) throw ConfigError("market: missing");
  try {
    return {cfg.require_pattern(0), cfg.require_pattern(1), cfg.market->y0, cfg.market->y1, cfg.market->S0};
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("market: ") + e.what());
  }
}

}  // namespace

int cmd_dist(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const DistConfig& dc = cfg.dist;
  const PoExpDistribution dist(cfg.require_pattern(dc.pattern).holding_law());
  const PoExpParams& law = dist.params();
  if (dist.series_available()) {
    log << "series representation available (" << dist.b().size() << " coefficients)\n";
  } else {
    log << "series representation unavailable: " << dist.series_failure() << "; using the fallback\n";
  }

  std::vector<std::string> header{"t", "survivor_series", "survivor_fallback", "density", "method"};
  for (std::size_t n = 0; n <= dc.n_max; ++n) header.push_back("joint_" + std::to_string(n));
  CsvWriter csv(opt.out_dir / "dist.csv", header);

  std::vector<double> times(dc.points);
  for (std::size_t i = 0; i < dc.points; ++i) {
    times[i] = dc.t_max * static_cast<double>(i) / static_cast<double>(dc.points - 1);
  }
  const auto fallback = dist.fallback_grid(times);
  const auto main = dist.series_available() ? dist.on_grid(times) : fallback;
  double best_t = 0.0, best_f = -INFINITY;
  for (std::size_t i = 0; i < dc.points; ++i) {
    const double t = times[i];
    if (main.density[i] > best_f) {
      best_f = main.density[i];
      best_t = t;
    }
    auto row = csv.row();
    row << t << (dist.series_available() ? main.survivor[i] : NAN) << fallback.survivor[i] << main.density[i]
        << to_string(main.method);
    for (std::size_t n = 0; n <= dc.n_max; ++n) row << joint_survivor(law, t, n);
  }
  log << "density maximum on the grid at t = " << format_number(best_t) << "\n";

  CsvWriter moments(opt.out_dir / "moments.csv", {"m", "value", "error_estimate", "series_value"});
  for (unsigned m = 1; m <= dc.moments; ++m) {
    const MomentResult r = dist.moment(m);
    moments.row() << static_cast<std::size_t>(m) << (r.infinite ? INFINITY : r.value) << r.error_estimate
                  << (r.series_value ? *r.series_value : NAN);
    log << "E T^" << m << " = " << (r.infinite ? std::string("inf") : format_number(r.value)) << "\n";
  }
  return kOk;
}

int cmd_simulate(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const SimulationConfig& sc = cfg.simulation;
  check_simulation(sc);
  const PatternParams& s0 = cfg.require_pattern(0);
  const PatternParams& s1 = cfg.require_pattern(1);
  std::optional<MarketScenario> market;
  if (cfg.market) market = build_market(cfg);

  // Listed paths use their own substreams so they do not overlap the Monte Carlo ones.
  const std::uint64_t listing_seed = splitmix64(sc.seed ^ 0x6576656e7473ULL);
  CsvWriter events(opt.out_dir / "events.csv", {"path", "time", "kind", "size", "state", "slope"});
  std::optional<CsvWriter> prices;
  if (market) prices.emplace(opt.out_dir / "market_paths.csv",
                             std::vector<std::string>{"path", "t", "X", "bond", "stock", "discounted"});
  for (std::size_t p = 0; p < sc.event_paths; ++p) {
    RandomStream rng(listing_seed, p);
    ProcessPath path;
    try {
      path = simulate_path(s0, s1, sc.initial_state, sc.horizon, rng);
    } catch (const ExplosionCap& e) {
      events.row() << p << NAN << "explosion_cap" << NAN << -1 << NAN;
      log << "path " << p << ": " << e.what() << "\n";
      continue;
    }
    events.row() << p << 0.0 << "start" << 0.0 << path.segments.front().state << path.segments.front().slope;
    for (std::size_t j = 0; j < path.events.size(); ++j) {
      const PathEvent& ev = path.events[j];
      const PathSegment& next = path.segments[j + 1];
      events.row() << p << ev.time << to_string(ev.kind) << ev.size << next.state << next.slope;
    }
    if (prices) {
      const MarketPath mp{path, market->y, market->S0};
      for (double t : sc.times) {
        prices->row() << p << t << path.value_at(t) << mp.bond_at(t) << mp.stock_at(t) << mp.discounted_at(t);
      }
    }
  }

  CsvWriter summary(opt.out_dir / "summary.csv", {"t", "mean", "se", "status"});
  try {
    const MeanEstimate est = empirical_mean(s0, s1, sc.initial_state, sc.times, sc.n_paths, sc.seed, opt.workers);
    for (std::size_t j = 0; j < est.times.size(); ++j) {
      summary.row() << est.times[j] << est.mean[j] << est.standard_error[j] << "ok";
    }
  } catch (const ExplosionCap& e) {
    for (double t : sc.times) summary.row() << t << NAN << NAN << "explosion_cap";
    log << "summary: " << e.what() << "\n";
  }
  return kOk;
}

int cmd_mean(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const SimulationConfig& sc = cfg.simulation;
  check_simulation(sc);
  const PatternParams& s0 = cfg.require_pattern(0);
  const PatternParams& s1 = cfg.require_pattern(1);

  const MeanGrid grid = solve_mean_equations(s0, s1, sc.horizon, sc.step);
  for (int i = 0; i < 2; ++i) {
    log << "state " << i << ": source " << to_string(grid.source_method[i]) << ", kernel "
        << to_string(grid.density_method[i]) << "\n";
  }
  {
    CsvWriter full(opt.out_dir / "mean_grid.csv", {"t", "M0", "M1"});
    for (std::size_t j = 0; j < grid.times.size(); ++j) full.row() << grid.times[j] << grid.M0[j] << grid.M1[j];
  }

  const MeanEstimate mc0 = empirical_mean(s0, s1, 0, sc.times, sc.n_paths, sc.seed, opt.workers);
  const MeanEstimate mc1 = empirical_mean(s0, s1, 1, sc.times, sc.n_paths, splitmix64(sc.seed) + 1, opt.workers);
  CsvWriter csv(opt.out_dir / "mean.csv", {"t", "M0_solver", "M1_solver", "M0_mc", "M1_mc", "M0_se", "M1_se"});
  double worst = 0.0;
  for (std::size_t j = 0; j < sc.times.size(); ++j) {
    const double t = sc.times[j];
    const double m0 = on_uniform_grid(grid.M0, grid.step, t);
    const double m1 = on_uniform_grid(grid.M1, grid.step, t);
    csv.row() << t << m0 << m1 << mc0.mean[j] << mc1.mean[j] << mc0.standard_error[j] << mc1.standard_error[j];
    worst = std::max({worst, z_score(mc0.mean[j], m0, mc0.standard_error[j]),
                      z_score(mc1.mean[j], m1, mc1.standard_error[j])});
  }
  log << "largest solver/Monte Carlo discrepancy: " << format_number(worst) << " SE\n";
  if (worst > sc.z_threshold) {
    log << "verification failed: threshold " << sc.z_threshold << " SE\n";
    return kVerificationFailure;
  }
  return kOk;
}

int cmd_market(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const SimulationConfig& sc = cfg.simulation;
  check_simulation(sc);
  const MarketScenario m = build_market(cfg);

  const ArbitrageReport arb = detect_arbitrage(m);
  {
    // Consecutive indices with the same verdict are written as one range.
    CsvWriter csv(opt.out_dir / "arbitrage.csv", {"state", "n_first", "n_last", "kind", "in_tail"});
    const auto& v = arb.violations;
    for (std::size_t i = 0; i < v.size();) {
      std::size_t j = i;
      while (j + 1 < v.size() && v[j + 1].state == v[i].state && v[j + 1].kind == v[i].kind &&
             v[j + 1].in_tail == v[i].in_tail && v[j + 1].n == v[j].n + 1) {
        ++j;
      }
      csv.row() << v[i].state << v[i].n << v[j].n << v[i].kind << (v[i].in_tail ? "true" : "false");
      i = j + 1;
    }
  }
  if (!arb.arbitrage_free) {
    log << "verdict: arbitrage (" << arb.violations.size() << " one-sided indices or tail classes)\n";
    return kOk;
  }
  log << "verdict: arbitrage-free\n";

  const std::array<Sequence, 2> zero{Sequence::constant(0.0), Sequence::constant(0.0)};
  const auto& ec = cfg.esscher;
  const bool constructed = !ec.R_star.has_value();
  EsscherParams e = [&] {
    try {
      if (constructed) return construct_martingale_measure(m, ec.r_star.value_or(zero));
      return esscher_derive(m, ec.r_star.value_or(zero), *ec.R_star);
    } catch (const InvalidGirsanov& err) {
      throw ConfigError(std::string("esscher: ") + err.what());
    }
  }();
  log << (constructed ? "constructed martingale measure\n" : "Esscher transform from the configuration\n");

  const MeasureChangeReport rep =
      verify_measure_change(m, e, sc.initial_state, sc.times, ec.n_max, sc.n_paths, sc.seed, opt.workers);
  {
    CsvWriter csv(opt.out_dir / "esscher.csv",
                  {"t", "n", "reweighted", "reweighted_se", "analytic", "direct", "direct_se"});
    for (const auto& r : rep.rows) {
      csv.row() << r.t << r.n << r.reweighted << r.reweighted_se << r.analytic << r.direct << r.direct_se;
    }
  }
  double worst_price = 0.0;
  {
    CsvWriter csv(opt.out_dir / "esscher_times.csv",
                  {"t", "Z_mean", "Z_se", "discounted_direct", "discounted_direct_se", "discounted_reweighted",
                   "discounted_reweighted_se"});
    for (const auto& r : rep.times) {
      csv.row() << r.t << r.z_mean << r.z_se << r.discounted_direct << r.discounted_direct_se
                << r.discounted_reweighted << r.discounted_reweighted_se;
      worst_price = std::max(worst_price, z_score(r.discounted_direct, m.S0, r.discounted_direct_se));
    }
  }
  log << "measure change: max discrepancy " << format_number(rep.max_z) << " SE, E Z(t) - 1 "
      << format_number(rep.max_z_mean) << " SE\n";
  bool pass = rep.max_z <= sc.z_threshold && rep.max_z_mean <= sc.z_threshold;
  if (constructed) {
    log << "discounted price vs S0: " << format_number(worst_price) << " SE\n";
    pass = pass && worst_price <= sc.z_threshold;
  }
  if (!pass) {
    log << "verification failed: threshold " << sc.z_threshold << " SE\n";
    return kVerificationFailure;
  }
  return kOk;
}

}  // namespace poexp::cli

// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "../../tools/config.hpp"
#include "poexp/poexp.hpp"

using namespace poexp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

cli::ScenarioConfig config(const char* name) { return cli::load_config(std::string(POEXP_CONFIG_DIR "/") + name); }

// ---------------------------------------------------------------------------

void vandermonde(Outcome& o) {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> u(0.5, 10.0);
  std::uniform_int_distribution<std::size_t> order(1, 12);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(order(gen) + 1);
    for (auto& v : x) v = u(gen);
    worst = std::max(worst, check_vandermonde(x));
  }
  o.detail << "max residual " << worst;
  o.require(worst < 1e-8, "residual < 1e-8");
}

void normalization(Outcome& o) {
  const std::vector<std::pair<const char*, IntensitySequence>> cases{
      {"constant", IntensitySequence::constant(2.0)},
      {"affine", IntensitySequence::affine(2.0, 0.5)},
      {"example-b", IntensitySequence::affine(1.0, 1.0)}};
  double lo = 1.0, hi = 1.0;
  for (const auto& [name, lambda] : cases) {
    for (double t : {0.5, 1.0, 2.0}) {
      CompensatedSum s;
      for (std::size_t n = 0; n <= 400; ++n) {
        const double p = pmf_pi(lambda, n, t);
        s.add(p);
        if (n > 20 && p < 1e-20) break;
      }
      const double total = static_cast<double>(s.value());
      lo = std::min(lo, total);
      hi = std::max(hi, total);
      o.require(total >= 1.0 - 1e-8 && total <= 1.0 + 1e-12, std::string(name) + " t=" + std::to_string(t));
    }
  }
  o.detail << "sums in [" << 1.0 - lo << " below, " << hi - 1.0 << " above] 1";
}

void explosion(Outcome& o) {
  const IntensitySequence lambda(Sequence(TailRule::quadratic(1.0)));
  constexpr std::size_t kPaths = 100000, kCap = 10000;
  const auto blocks = run_blocks<RunningStats>(kPaths, default_workers(), [&](std::size_t b, std::size_t e) {
    RunningStats st;
    for (std::size_t i = b; i < e; ++i) {
      RandomStream rng(77, i);
      const CountingPath p = sample_counting_path(lambda, 1.0, rng, kCap);
      st.add(!p.truncated && p.count_at(1.0) < kCap ? 1.0 : 0.0);
    }
    return st;
  });
  RunningStats all;
  for (const auto& b : blocks) all.merge(b);
  double oracle = 0.0;
  for (int n = 1; n < 60; ++n) oracle += (n % 2 ? 2.0 : -2.0) * std::exp(-double(n) * n);
  const double z = std::abs(all.mean - oracle) / all.standard_error();
  o.detail << "P{N(1) < cap} = " << all.mean << " vs " << oracle << " (" << z << " SE)";
  o.require(z < 4.0, "within 4 SE");
}

void sampler(Outcome& o) {
  const std::vector<PoExpParams> sets{
      {IntensitySequence::constant(1.5), IntensitySequence::affine(1.0, 1.0)},
      {IntensitySequence::affine(1.0, 1.0), IntensitySequence::affine(0.5, 0.2)}};
  const std::vector<double> times{0.25, 0.5, 1.0, 2.0};
  constexpr std::size_t kN = 4, kSamples = 100000;
  double worst = 0.0;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    std::vector<RunningStats> st(times.size() * kN);
    RandomStream rng(1000 + s, 0);
    for (std::size_t i = 0; i < kSamples; ++i) {
      const PoExpSample x = sample(sets[s], rng);
      for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        const auto shocks = static_cast<std::size_t>(
            std::upper_bound(x.shock_times.begin(), x.shock_times.end(), t) - x.shock_times.begin());
        for (std::size_t n = 0; n < kN; ++n) st[j * kN + n].add(x.T > t && shocks == n ? 1.0 : 0.0);
      }
    }
    for (std::size_t j = 0; j < times.size(); ++j) {
      for (std::size_t n = 0; n < kN; ++n) {
        const RunningStats& r = st[j * kN + n];
        const double exact = joint_survivor(sets[s], times[j], n);
        const double se = std::max(r.standard_error(), 1.0 / kSamples);
        const double z = std::abs(r.mean - exact) / se;
        worst = std::max(worst, z);
        o.require(z < 4.0, "set " + std::to_string(s) + " t=" + std::to_string(times[j]) + " n=" + std::to_string(n));
      }
    }
  }
  o.detail << "worst discrepancy " << worst << " SE over 32 cells";
}

void linear_case(Outcome& o) {
  const LinearCaseParams lin(1.5, 1.0, 1.0);
  const PoExpDistribution d(lin.to_poexp());
  o.require(d.series_available(), "series available");
  std::vector<double> grid;
  for (int i = 0; i <= 500; ++i) grid.push_back(0.01 * i);
  const auto g = d.on_grid(grid);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    err = std::max(err, std::abs(g.survivor[i] - survivor_linear(lin, grid[i])));
    err = std::max(err, std::abs(g.density[i] - density_linear(lin, grid[i])));
  }
  o.require(err < 1e-8, "closed forms to 1e-8");
  const double f0 = d.density(0.0).value;
  o.require(f0 == 1.0, "f(0) = mu_0 exactly");

  std::vector<double> fine;
  for (int i = 0; i <= 20000; ++i) fine.push_back(1e-4 * i);
  const auto gf = d.on_grid(fine);
  const auto arg = static_cast<std::size_t>(std::max_element(gf.density.begin(), gf.density.end()) - gf.density.begin());
  const double mode = density_mode(lin);
  o.require(std::abs(fine[arg] - mode) < 1e-3, "mode within 1e-3 of grid argmax");
  o.detail << "max error " << err << ", f(0) = " << f0 << ", mode " << mode << " vs argmax " << fine[arg];
}

void moments(Outcome& o) {
  const auto b = PoExpDistribution({IntensitySequence::affine(1.0, 1.0), IntensitySequence::constant(1.0)}).moment(1);
  o.require(std::abs(b.value - 1.0) <= 1e-10, "example (b)");

  const IntensitySequence half_sq(Sequence(TailRule::quadratic(0.5)));
  const auto a = PoExpDistribution({half_sq, half_sq}).moment(1);
  long double oracle_a = 0.0L;
  for (int n = 0; n < 200; ++n) oracle_a += std::ldexp(1.0L, -n) / ((n + 1.0L) * (n + 1.0L));
  o.require(std::abs(a.value - static_cast<double>(oracle_a)) <= 1e-10, "example (a)");

  const auto c =
      PoExpDistribution({IntensitySequence::constant(1.0), IntensitySequence(Sequence(TailRule::reciprocal(1.0)))})
          .moment(1);
  o.require(c.infinite && std::isinf(c.value), "example (c) infinite");

  const LinearCaseParams lin(1.5, 1.0, 1.0);
  const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) { return survivor_linear(lin, t); }, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
  const double ml = moment_linear(lin, 1);
  o.require(std::abs(ml - quad) <= 1e-8, "linear mean vs quadrature");
  o.detail.precision(15);
  o.detail << "E_b T = " << b.value << ", E_a T = " << a.value << " (oracle " << static_cast<double>(oracle_a)
           << "), E_c T = " << c.value << ", linear " << ml << " vs " << quad;
}

void mean_equations(Outcome& o) {
  const auto mart = config("martingale.json");
  const MeanGrid zero = solve_mean_equations(mart.require_pattern(0), mart.require_pattern(1), 2.0, 0.01);
  double worst_zero = 0.0;
  for (std::size_t j = 0; j < zero.times.size(); ++j) {
    worst_zero = std::max({worst_zero, std::abs(zero.M0[j]), std::abs(zero.M1[j])});
  }
  o.require(worst_zero < 1e-8, "zero drift gives zero mean");

  const auto fig = config("fig1.json");
  const auto& s0 = fig.require_pattern(0);
  const auto& s1 = fig.require_pattern(1);
  const MeanGrid g = solve_mean_equations(s0, s1, 2.0, 0.01);
  const std::vector<double> times{0.5, 1.0, 2.0};
  double worst = 0.0;
  for (int state = 0; state < 2; ++state) {
    const auto mc = empirical_mean(s0, s1, state, times, 100000, fig.simulation.seed + state);
    const auto& M = state == 0 ? g.M0 : g.M1;
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double solver = M[static_cast<std::size_t>(std::lround(times[j] / g.step))];
      const double z = std::abs(mc.mean[j] - solver) / mc.standard_error[j];
      worst = std::max(worst, z);
      o.require(z < 3.0, "state " + std::to_string(state) + " t=" + std::to_string(times[j]));
    }
  }
  o.detail << "|M| <= " << worst_zero << " when drift vanishes; solver vs MC worst " << worst << " SE";
}

void martingale(Outcome& o) {
  const auto cfg = config("martingale.json");
  const PatternParams& s0 = cfg.require_pattern(0);
  const PatternParams& s1 = cfg.require_pattern(1);
  o.require(is_martingale(s0, s1).martingale, "configuration passes");
  const auto mc = empirical_mean(s0, s1, 0, {1.0}, 100000, cfg.simulation.seed);
  const double z = std::abs(mc.mean[0]) / mc.standard_error[0];
  o.require(z < 4.0, "mean of X(1) near 0");

  PatternParams bumped = s0;
  bumped.c = Sequence({s0.c.term(0) + 0.1}, s0.c.tail());
  const MartingaleReport rep = is_martingale(bumped, s1);
  o.require(!rep.martingale, "perturbation detected");
  const auto mb = empirical_mean(bumped, s1, 0, {2.0}, 100000, cfg.simulation.seed);
  const double zb = std::abs(mb.mean[0]) / mb.standard_error[0];
  o.require(zb > 4.0, "perturbed mean shifts");
  o.detail << "E X(1) = " << mc.mean[0] << " (" << z << " SE); perturbed E X(2) = " << mb.mean[0] << " (" << zb
           << " SE)";
}

MarketScenario scenario(const cli::ScenarioConfig& cfg) {
  return {cfg.require_pattern(0), cfg.require_pattern(1), cfg.market->y0, cfg.market->y1, cfg.market->S0};
}

void esscher(Outcome& o) {
  const auto cfg = config("esscher.json");
  const MarketScenario m = scenario(cfg);
  const EsscherParams e = esscher_derive(m, *cfg.esscher.r_star, *cfg.esscher.R_star);
  const auto rep = verify_measure_change(m, e, 0, cfg.simulation.times, 3, 100000, cfg.simulation.seed);
  o.require(rep.max_z_mean < 4.0, "E Z(t) = 1");
  o.require(rep.max_z < 4.0, "reweighted joint survivor vs analytic");
  bool all_analytic = true;
  for (const auto& row : rep.rows) all_analytic = all_analytic && std::isfinite(row.analytic);
  o.require(all_analytic, "analytic values available");

  const auto mcfg = config("market.json");
  const MarketScenario mm = scenario(mcfg);
  const EsscherParams star = construct_martingale_measure(mm, {Sequence::constant(0.0), Sequence::constant(0.0)});
  const auto rm = verify_measure_change(mm, star, 0, {1.0}, 0, 100000, mcfg.simulation.seed);
  const auto& row = rm.times.front();
  const double zs = std::abs(row.discounted_direct - mm.S0) / row.discounted_direct_se;
  o.require(zs < 4.0, "discounted S(1) = S0");
  o.detail << "E Z worst " << rep.max_z_mean << " SE, joint survivor worst " << rep.max_z
           << " SE, discounted S(1) = " << row.discounted_direct << " (" << zs << " SE)";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void determinism(Outcome& o) {
  const fs::path root = fs::temp_directory_path() / "poexp_acceptance";
  fs::remove_all(root);
  struct Run {
    const char* command;
    const char* config;
  };
  const std::vector<Run> runs{{"simulate", "fig1.json"}, {"mean", "fig1.json"}, {"market", "market.json"},
                              {"dist", "fig3.json"}};
  std::size_t files = 0;
  for (const auto& r : runs) {
    std::vector<fs::path> dirs;
    for (const char* threads : {"1", "3", "1"}) {
      const fs::path dir = root / (std::string(r.command) + "_" + threads + "_" + std::to_string(dirs.size()));
      const std::string cmd = std::string("\"") + POEXP_CLI + "\" " + r.command + " --config \"" + POEXP_CONFIG_DIR +
                              "/" + r.config + "\" --out \"" + dir.string() + "\" --paths 8192 --threads " + threads +
                              " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      o.require(status == 0, std::string(r.command) + " exit status");
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string base = slurp(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) {
        o.require(base == slurp(dirs[k] / entry.path().filename()),
                  entry.path().filename().string() + " identical in " + dirs[k].filename().string());
      }
      ++files;
    }
  }
  o.require(files >= 8, "all commands produced output");
  o.detail << files << " CSV files compared across --threads 1, 3 and a repeat";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"vandermonde", vandermonde}, {"normalization", normalization}, {"explosion", explosion},
      {"sampler", sampler},         {"linear-case", linear_case},     {"moments", moments},
      {"mean-equations", mean_equations}, {"martingale", martingale}, {"esscher", esscher},
      {"determinism", determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %-15s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

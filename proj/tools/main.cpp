#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "commands.hpp"
#include "config.hpp"
#include "poexp/errors.hpp"
#include "poexp/random.hpp"

namespace {

using namespace poexp::cli;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> horizon;
  std::optional<double> step;
  std::size_t threads = 0;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Scenario file (JSON)")->required();
  sub->add_option("--out", o.out, "Output directory (default: $POEXP_OUT_DIR, then the config, then .)");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--paths", o.paths, "Monte Carlo paths");
  sub->add_option("--horizon", o.horizon, "Simulation horizon");
  sub->add_option("--step", o.step, "Volterra time step");
  sub->add_option("--threads", o.threads, "Worker threads (0: hardware concurrency); results do not depend on it");
}

int run(int (*command)(const ScenarioConfig&, const RunOptions&, std::ostream&), const Overrides& o) {
  try {
    ScenarioConfig cfg = load_config(o.config);
    if (o.seed) cfg.simulation.seed = *o.seed;
    if (o.paths) cfg.simulation.n_paths = *o.paths;
    if (o.horizon) cfg.simulation.horizon = *o.horizon;
    if (o.step) cfg.simulation.step = *o.step;

    RunOptions opt;
    if (!o.out.empty()) {
      opt.out_dir = o.out;
    } else if (const char* env = std::getenv("POEXP_OUT_DIR"); env && *env) {
      opt.out_dir = env;
    } else if (cfg.output) {
      opt.out_dir = *cfg.output;
    }
    std::filesystem::create_directories(opt.out_dir);
    opt.workers = o.threads ? o.threads : poexp::default_workers();
    return command(cfg, opt, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const poexp::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const poexp::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PoExp laws, two-pattern jump processes and their market model"};
  app.require_subcommand(1);
  Overrides o;
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const ScenarioConfig&, const RunOptions&, std::ostream&);
  };
  const Sub subs[] = {
      {"dist", "Survivor, density, joint laws and moments of a holding time", cmd_dist},
      {"simulate", "Sample paths and Monte Carlo means", cmd_simulate},
      {"mean", "Mean equations against Monte Carlo", cmd_mean},
      {"market", "Arbitrage check and Esscher measure change", cmd_market},
  };
  int code = 0;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, o);
    sub->callback([&, fn = s.fn] { code = run(fn, o); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  return code;
}

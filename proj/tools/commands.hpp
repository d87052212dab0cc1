#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>

#include "config.hpp"

namespace poexp::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericFailure = 3,
  kVerificationFailure = 4,
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::size_t workers = 1;
};

/// Survivor, density and joint laws of one pattern's holding time, plus its moments.
/// Writes dist.csv and moments.csv.
int cmd_dist(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

/// Event listings for a few paths and Monte Carlo means of X on the report times.
/// Writes events.csv and summary.csv, plus market_paths.csv when a market is configured.
int cmd_simulate(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

/// Renewal-equation means against Monte Carlo. Writes mean.csv and mean_grid.csv.
int cmd_mean(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

/// Arbitrage check, Esscher parameters and measure-change verification.
/// Writes arbitrage.csv and, for arbitrage-free markets, esscher.csv and esscher_times.csv.
int cmd_market(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

}  // namespace poexp::cli

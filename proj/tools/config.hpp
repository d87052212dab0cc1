#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "poexp/sequence.hpp"
#include "poexp/telegraph.hpp"

namespace poexp::cli {

/// Malformed or invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulationConfig {
  double horizon = 2.0;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  /// Volterra step; 0 selects horizon/100.
  double step = 0.0;
  int initial_state = 0;
  /// Paths written event by event by `simulate`.
  std::size_t event_paths = 5;
  /// Report times for Monte Carlo summaries.
  std::vector<double> times{0.5, 1.0, 2.0};
  /// Allowed discrepancy, in standard errors, before a verification counts as failed.
  double z_threshold = 4.0;
};

struct DistConfig {
  int pattern = 0;
  double t_max = 5.0;
  std::size_t points = 501;
  /// Joint columns P{T > t, N(t) = n} for n = 0..n_max.
  std::size_t n_max = 3;
  unsigned moments = 4;
};

struct MarketConfig {
  double y0 = 0.0;
  double y1 = 0.0;
  double S0 = 1.0;
};

struct EsscherConfig {
  std::optional<std::array<Sequence, 2>> r_star;
  std::optional<std::array<Sequence, 2>> R_star;
  /// Shock counts n = 0..n_max in the measure-change table.
  std::size_t n_max = 3;
};

struct ScenarioConfig {
  std::array<std::optional<PatternParams>, 2> pattern;
  std::optional<MarketConfig> market;
  SimulationConfig simulation;
  DistConfig dist;
  EsscherConfig esscher;
  std::optional<std::string> output;

  /// Throws ConfigError when the pattern is missing.
  [[nodiscard]] const PatternParams& require_pattern(int i) const;
};

[[nodiscard]] ScenarioConfig parse_config(const std::string& text);
[[nodiscard]] ScenarioConfig load_config(const std::string& path);

}  // namespace poexp::cli

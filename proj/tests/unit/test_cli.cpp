#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "../../tools/commands.hpp"
#include "../../tools/config.hpp"

using namespace poexp;
using namespace poexp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("poexp_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("sequence and law syntax") {
    const ScenarioConfig cfg = parse_config(R"({
      "pattern0": {"c": {"prefix": [2.0], "tail": {"periodic": [0.5, -1.0]}},
                   "r": {"discrete": {"values": [-0.5, 0.1], "probs": [0.5, 0.5]}},
                   "R": {"prefix": [0.3], "tail": -0.7},
                   "lambda": {"tail": {"quadratic": 0.5}}, "mu": {"tail": {"reciprocal": 1.0}}},
      "simulation": {"seed": 9, "times": [1.0]}
    })");
    const PatternParams& p = cfg.require_pattern(0);
    CHECK(p.c.term(0) == 2.0);
    CHECK(p.c.term(1) == -1.0);
    CHECK(p.c.term(2) == 0.5);
    CHECK(p.r_mean().term(5) == doctest::Approx(-0.2));
    CHECK(p.R_mean().term(0) == doctest::Approx(0.3));
    CHECK(p.R_mean().term(1) == doctest::Approx(-0.7));
    CHECK(p.lambda.term(3) == doctest::Approx(0.5 * 16.0));
    CHECK(p.mu.term(3) == doctest::Approx(0.25));
    CHECK(cfg.simulation.seed == 9);
    CHECK_FALSE(cfg.pattern[1].has_value());
    CHECK_THROWS_AS((void)cfg.require_pattern(1), ConfigError);
  }

  TEST_CASE("errors name the field") {
    CHECK(config_error(R"({"pattern0": {"c": 0, "lambda": -1, "mu": 1}})").find("pattern0.lambda") !=
          std::string::npos);
    CHECK(config_error(R"({"pattern0": {"c": 0, "lambda": 1}})").find("pattern0.mu") != std::string::npos);
    CHECK(config_error(R"({"simulation": {"n_paths": "many"}})").find("simulation.n_paths") != std::string::npos);
    CHECK(config_error(R"({"simulation": {"bogus": 1}})").find("simulation.bogus") != std::string::npos);
    CHECK(config_error(R"({"pattern0": {"c": 0, "lambda": 1, "mu": 1,
                           "r": {"discrete": {"values": [1, 2], "probs": [0.5]}}}})")
              .find("pattern0.r") != std::string::npos);
    CHECK(config_error("{not json").find("syntax") != std::string::npos);
    CHECK_THROWS_AS((void)load_config("/nonexistent/poexp.json"), ConfigError);
  }

  TEST_CASE("dist writes formatted moments") {
    const fs::path dir = scratch("dist_b");
    std::ostringstream log;
    const ScenarioConfig cfg = load_config(POEXP_CONFIG_DIR "/example_b.json");
    REQUIRE(cmd_dist(cfg, {dir, 1}, log) == kOk);
    const std::string moments = slurp(dir / "moments.csv");
    CHECK(moments.find("1,1.000000000000e+00") != std::string::npos);
    CHECK(moments.find("2,2.000000000000e+00") != std::string::npos);
    const std::string dist = slurp(dir / "dist.csv");
    CHECK(dist.rfind("t,survivor_series,survivor_fallback,density,method,joint_0", 0) == 0);

    const fs::path dir_c = scratch("dist_c");
    REQUIRE(cmd_dist(load_config(POEXP_CONFIG_DIR "/example_c.json"), {dir_c, 1}, log) == kOk);
    CHECK(slurp(dir_c / "moments.csv").find("1,inf") != std::string::npos);
  }

  TEST_CASE("outputs do not depend on the worker count") {
    ScenarioConfig cfg = load_config(POEXP_CONFIG_DIR "/fig1.json");
    cfg.simulation.n_paths = 5000;
    std::ostringstream log;
    const fs::path a = scratch("mean_w1"), b = scratch("mean_w3");
    const int ca = cmd_mean(cfg, {a, 1}, log);
    const int cb = cmd_mean(cfg, {b, 3}, log);
    CHECK(ca == cb);
    CHECK(slurp(a / "mean.csv") == slurp(b / "mean.csv"));
    CHECK(slurp(a / "mean_grid.csv") == slurp(b / "mean_grid.csv"));
  }

  TEST_CASE("arbitrage verdict") {
    ScenarioConfig cfg = load_config(POEXP_CONFIG_DIR "/arbitrage.json");
    const fs::path dir = scratch("arbitrage");
    std::ostringstream log;
    CHECK(cmd_market(cfg, {dir, 1}, log) == kOk);
    CHECK(log.str().find("arbitrage") != std::string::npos);
    CHECK(fs::exists(dir / "arbitrage.csv"));
    CHECK_FALSE(fs::exists(dir / "esscher.csv"));
  }
}

#include "config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "poexp/errors.hpp"

namespace poexp::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::uint64_t unsigned_integer(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) fail(field, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& field) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(field + "." + key, "unknown key");
  }
}

TailRule parse_tail(const json& j, const std::string& field) {
  if (j.is_number()) return TailRule::constant(j.get<double>());
  if (!j.is_object() || j.size() != 1) {
    fail(field, "expected a number or one of {constant, affine, quadratic, reciprocal, periodic}");
  }
  const std::string kind = j.begin().key();
  const json& v = j.begin().value();
  const std::string f = field + "." + kind;
  if (kind == "constant") return TailRule::constant(number(v, f));
  if (kind == "affine") {
    const auto ab = numbers(v, f);
    if (ab.size() != 2) fail(f, "expected [a, b] for a + b·n");
    return TailRule::affine(ab[0], ab[1]);
  }
  if (kind == "quadratic") return TailRule::quadratic(number(v, f));
  if (kind == "reciprocal") return TailRule::reciprocal(number(v, f));
  if (kind == "periodic") {
    auto values = numbers(v, f);
    if (values.empty()) fail(f, "needs at least one value");
    return TailRule::periodic(std::move(values));
  }
  fail(f, "unknown tail kind");
}

Sequence parse_sequence(const json& j, const std::string& field) {
  if (j.is_number()) return Sequence::constant(j.get<double>());
  if (!j.is_object()) fail(field, "expected a number or {prefix, tail}");
  reject_unknown(j, {"prefix", "tail"}, field);
  std::vector<double> prefix;
  if (j.contains("prefix")) prefix = numbers(j["prefix"], field + ".prefix");
  if (!j.contains("tail")) fail(field + ".tail", "missing");
  return {std::move(prefix), parse_tail(j["tail"], field + ".tail")};
}

IntensitySequence parse_intensity(const json& j, const std::string& field) {
  try {
    return IntensitySequence(parse_sequence(j, field));
  } catch (const InvalidArgument& e) {
    fail(field, e.what());
  }
}

JumpLaw parse_law(const json& j, const std::string& field) {
  if (j.is_number()) return JumpLaw::deterministic(j.get<double>());
  if (!j.is_object() || j.size() != 1) fail(field, "expected a number, {deterministic} or {discrete}");
  const std::string kind = j.begin().key();
  const json& v = j.begin().value();
  const std::string f = field + "." + kind;
  if (kind == "deterministic") return JumpLaw::deterministic(number(v, f));
  if (kind == "discrete") {
    if (!v.is_object()) fail(f, "expected {values, probs}");
    reject_unknown(v, {"values", "probs"}, f);
    if (!v.contains("values") || !v.contains("probs")) fail(f, "needs values and probs");
    try {
      return JumpLaw::discrete(numbers(v["values"], f + ".values"), numbers(v["probs"], f + ".probs"));
    } catch (const InvalidArgument& e) {
      fail(f, e.what());
    }
  }
  fail(f, "unknown jump law kind");
}

std::vector<JumpLaw> parse_laws(const json& j, const std::string& field) {
  std::vector<JumpLaw> out;
  if (!j.is_array()) {
    out.push_back(parse_law(j, field));
    return out;
  }
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_law(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

JumpLawSequence parse_law_sequence(const json& j, const std::string& field) {
  if (j.is_object() && (j.contains("prefix") || j.contains("tail"))) {
    reject_unknown(j, {"prefix", "tail"}, field);
    std::vector<JumpLaw> prefix;
    if (j.contains("prefix")) {
      if (!j["prefix"].is_array()) fail(field + ".prefix", "expected an array of jump laws");
      prefix = parse_laws(j["prefix"], field + ".prefix");
    }
    if (!j.contains("tail")) fail(field + ".tail", "missing");
    auto tail = parse_laws(j["tail"], field + ".tail");
    if (tail.empty()) fail(field + ".tail", "needs at least one law");
    return {std::move(prefix), std::move(tail)};
  }
  return JumpLawSequence::constant(parse_law(j, field));
}

PatternParams parse_pattern(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  reject_unknown(j, {"c", "r", "R", "mu", "lambda"}, field);
  for (const char* key : {"c", "mu", "lambda"}) {
    if (!j.contains(key)) fail(field + "." + key, "missing");
  }
  auto laws = [&](const char* key) {
    return j.contains(key) ? parse_law_sequence(j[key], field + "." + key) : JumpLawSequence::zero();
  };
  return {parse_sequence(j["c"], field + ".c"), laws("r"), laws("R"), parse_intensity(j["mu"], field + ".mu"),
          parse_intensity(j["lambda"], field + ".lambda")};
}

std::array<Sequence, 2> parse_pair(const json& j, const std::string& field) {
  if (j.is_array()) {
    if (j.size() != 2) fail(field, "expected one sequence per state");
    return {parse_sequence(j[0], field + "[0]"), parse_sequence(j[1], field + "[1]")};
  }
  const Sequence s = parse_sequence(j, field);
  return {s, s};
}

}  // namespace

const PatternParams& ScenarioConfig::require_pattern(int i) const {
  if (!pattern[i]) fail("pattern" + std::to_string(i), "missing");
  return *pattern[i];
}

ScenarioConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("syntax: ") + e.what());
  }
  if (!root.is_object()) fail("<root>", "expected an object");
  reject_unknown(root, {"pattern0", "pattern1", "market", "simulation", "dist", "esscher", "output"}, "<root>");

  ScenarioConfig cfg;
  for (int i = 0; i < 2; ++i) {
    const std::string key = "pattern" + std::to_string(i);
    if (root.contains(key)) cfg.pattern[i] = parse_pattern(root[key], key);
  }

  if (root.contains("market")) {
    const json& m = root["market"];
    if (!m.is_object()) fail("market", "expected an object");
    reject_unknown(m, {"y0", "y1", "S0"}, "market");
    MarketConfig mc;
    if (m.contains("y0")) mc.y0 = number(m["y0"], "market.y0");
    if (m.contains("y1")) mc.y1 = number(m["y1"], "market.y1");
    if (m.contains("S0")) mc.S0 = number(m["S0"], "market.S0");
    if (!(mc.y0 >= 0.0)) fail("market.y0", "must be >= 0");
    if (!(mc.y1 >= 0.0)) fail("market.y1", "must be >= 0");
    if (!(mc.S0 > 0.0)) fail("market.S0", "must be > 0");
    cfg.market = mc;
  }

  if (root.contains("simulation")) {
    const json& s = root["simulation"];
    if (!s.is_object()) fail("simulation", "expected an object");
    reject_unknown(s, {"horizon", "n_paths", "seed", "step", "initial_state", "event_paths", "times", "z_threshold"},
                   "simulation");
    SimulationConfig& sc = cfg.simulation;
    if (s.contains("horizon")) sc.horizon = number(s["horizon"], "simulation.horizon");
    if (s.contains("n_paths")) sc.n_paths = unsigned_integer(s["n_paths"], "simulation.n_paths");
    if (s.contains("seed")) sc.seed = unsigned_integer(s["seed"], "simulation.seed");
    if (s.contains("step")) sc.step = number(s["step"], "simulation.step");
    if (s.contains("initial_state")) {
      const auto v = unsigned_integer(s["initial_state"], "simulation.initial_state");
      if (v > 1) fail("simulation.initial_state", "must be 0 or 1");
      sc.initial_state = static_cast<int>(v);
    }
    if (s.contains("event_paths")) sc.event_paths = unsigned_integer(s["event_paths"], "simulation.event_paths");
    if (s.contains("times")) sc.times = numbers(s["times"], "simulation.times");
    if (s.contains("z_threshold")) sc.z_threshold = number(s["z_threshold"], "simulation.z_threshold");
  }

  if (root.contains("dist")) {
    const json& d = root["dist"];
    if (!d.is_object()) fail("dist", "expected an object");
    reject_unknown(d, {"pattern", "t_max", "points", "n_max", "moments"}, "dist");
    DistConfig& dc = cfg.dist;
    if (d.contains("pattern")) {
      const auto v = unsigned_integer(d["pattern"], "dist.pattern");
      if (v > 1) fail("dist.pattern", "must be 0 or 1");
      dc.pattern = static_cast<int>(v);
    }
    if (d.contains("t_max")) dc.t_max = number(d["t_max"], "dist.t_max");
    if (d.contains("points")) dc.points = unsigned_integer(d["points"], "dist.points");
    if (d.contains("n_max")) dc.n_max = unsigned_integer(d["n_max"], "dist.n_max");
    if (d.contains("moments")) dc.moments = static_cast<unsigned>(unsigned_integer(d["moments"], "dist.moments"));
    if (!(dc.t_max > 0.0)) fail("dist.t_max", "must be > 0");
    if (dc.points < 2) fail("dist.points", "must be >= 2");
  }

  if (root.contains("esscher")) {
    const json& e = root["esscher"];
    if (!e.is_object()) fail("esscher", "expected an object");
    reject_unknown(e, {"r_star", "R_star", "n_max"}, "esscher");
    if (e.contains("r_star")) cfg.esscher.r_star = parse_pair(e["r_star"], "esscher.r_star");
    if (e.contains("R_star")) cfg.esscher.R_star = parse_pair(e["R_star"], "esscher.R_star");
    if (e.contains("n_max")) cfg.esscher.n_max = unsigned_integer(e["n_max"], "esscher.n_max");
  }

  if (root.contains("output")) {
    if (!root["output"].is_string()) fail("output", "expected a directory path");
    cfg.output = root["output"].get<std::string>();
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace poexp::cli

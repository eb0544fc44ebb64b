#pragma once

// Scenario files. The format is JSON:
//
//   {
//     "schema_version": 1,
//     "time_unit": "months",
//     "player_a": {"name": "A", "curve": {...}, "initial_delay": {...}, "cycle": {...}},
//     "player_b": {...},
//     "t_star": 17.95,
//     "thresholds": {"a": 17.95, "b": 17.95},
//     "trace_condition": true,
//     "mode": "deterministic",
//     "replications": 100000,
//     "seed": 1
//   }
//
// Everything except schema_version, player_a and player_b is optional.
// Errors carry the line of the offending key.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "duel/curves.hpp"
#include "duel/engine.hpp"
#include "duel/errors.hpp"
#include "duel/renewal.hpp"

namespace duel {

enum class RunMode { deterministic, monte_carlo, analytic, all };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::deterministic: return "deterministic";
    case RunMode::monte_carlo: return "monte-carlo";
    case RunMode::analytic: return "analytic";
    case RunMode::all: return "all";
  }
  return "?";
}

inline constexpr std::uint64_t default_replications = 100000;
inline constexpr std::uint64_t default_seed = 1;

struct ScenarioFile {
  DuelScenario scenario;
  RunMode mode = RunMode::deterministic;
  std::uint64_t replications = default_replications;
  std::uint64_t seed = default_seed;
};

namespace detail {

using nlohmann::json;

/// Finds the line of a key path by searching for each quoted key in turn,
/// starting after the previous match. Good enough for well-formed files
/// where keys are unique within their object.
class LineLocator {
 public:
  explicit LineLocator(std::string_view text) : text_(text) {}

  int line_of(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    std::size_t found = std::string_view::npos;
    for (const auto& key : path) {
      found = text_.find('"' + key + '"', pos);
      if (found == std::string_view::npos) return 0;
      pos = found + key.size() + 2;
    }
    return found == std::string_view::npos ? 0 : line_at(found);
  }

  int line_at(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
  }

 private:
  std::string_view text_;
};

class Reader {
 public:
  Reader(const json& root, std::string_view text) : root_(root), where_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string dotted;
    for (const auto& k : path) dotted += (dotted.empty() ? "" : ".") + k;
    throw validation_error(dotted + ": " + msg, where_.line_of(path));
  }

  const json& at(const std::vector<std::string>& path) const {
    const json* j = &root_;
    for (const auto& k : path) j = &(*j)[k];
    return *j;
  }

  bool has(const std::vector<std::string>& path) const {
    const json* j = &root_;
    for (const auto& k : path) {
      if (!j->is_object() || !j->contains(k)) return false;
      j = &(*j)[k];
    }
    return true;
  }

  void only_keys(const std::vector<std::string>& path, std::initializer_list<std::string_view> allowed) const {
    const json& j = at(path);
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [k, _] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        auto p = path;
        p.push_back(k);
        fail(p, "unknown key");
      }
    }
  }

  const json& require(const std::vector<std::string>& path) const {
    if (!has(path)) {
      auto parent = path;
      parent.pop_back();
      throw validation_error(
          "missing required key \"" + path.back() + "\"" + (parent.empty() ? "" : " in " + dotted(parent)),
          parent.empty() ? 1 : where_.line_of(parent));
    }
    return at(path);
  }

  double number(const std::vector<std::string>& path) const {
    const json& j = require(path);
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  std::string string(const std::vector<std::string>& path) const {
    const json& j = require(path);
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  std::uint64_t count(const std::vector<std::string>& path) const {
    const json& j = require(path);
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) fail(path, "must be >= 0");
    fail(path, "expected an integer");
  }

  /// Runs a factory and rethrows its validation errors anchored at `path`.
  template <class F>
  auto anchored(const std::vector<std::string>& path, F make) const {
    try {
      return make();
    } catch (const validation_error& e) {
      if (e.line() > 0) throw;
      fail(path, e.what());
    } catch (const domain_error& e) {
      fail(path, e.what());
    }
  }

 private:
  static std::string dotted(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& k : path) s += (s.empty() ? "" : ".") + k;
    return s;
  }

  const json& root_;
  LineLocator where_;
};

inline Distribution read_distribution(const Reader& r, const std::vector<std::string>& path) {
  r.require(path);
  auto kind_path = path;
  kind_path.push_back("kind");
  const std::string kind = r.string(kind_path);
  auto sub = [&](const char* k) {
    auto p = path;
    p.push_back(k);
    return p;
  };
  if (kind == "deterministic") {
    r.only_keys(path, {"kind", "value"});
    return r.anchored(sub("value"), [&] { return Distribution::deterministic(r.number(sub("value"))); });
  }
  if (kind == "exponential") {
    r.only_keys(path, {"kind", "rate"});
    return r.anchored(sub("rate"), [&] { return Distribution::exponential(r.number(sub("rate"))); });
  }
  r.fail(kind_path, "unknown distribution kind \"" + kind + "\" (deterministic, exponential)");
}

inline SuccessCurve read_curve(const Reader& r, const std::vector<std::string>& path) {
  auto sub = [&](const char* k) {
    auto p = path;
    p.push_back(k);
    return p;
  };
  const std::string kind = r.string(sub("kind"));
  if (kind == "exponential-saturation") {
    r.only_keys(path, {"kind", "rate"});
    return r.anchored(sub("rate"), [&] { return SuccessCurve::exponential_saturation(r.number(sub("rate"))); });
  }
  if (kind == "logistic") {
    r.only_keys(path, {"kind", "midpoint", "steepness"});
    return r.anchored(path, [&] {
      return SuccessCurve::logistic(r.number(sub("midpoint")), r.number(sub("steepness")));
    });
  }
  if (kind == "linear-ramp") {
    r.only_keys(path, {"kind", "t_ramp"});
    return r.anchored(sub("t_ramp"), [&] { return SuccessCurve::linear_ramp(r.number(sub("t_ramp"))); });
  }
  if (kind == "tabulated") {
    r.only_keys(path, {"kind", "knots"});
    const json& ks = r.require(sub("knots"));
    if (!ks.is_array()) r.fail(sub("knots"), "expected an array of [t, p] pairs");
    std::vector<Knot> knots;
    for (const auto& k : ks) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
        r.fail(sub("knots"), "each knot must be a [t, p] pair of numbers");
      knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    return r.anchored(sub("knots"), [&] { return SuccessCurve::tabulated(std::move(knots)); });
  }
  r.fail(sub("kind"), "unknown curve kind \"" + kind + "\" (exponential-saturation, logistic, linear-ramp, tabulated)");
}

inline Player read_player(const Reader& r, const std::string& key, const std::string& default_name) {
  r.require({key});
  r.only_keys({key}, {"name", "curve", "initial_delay", "cycle"});
  Player p;
  p.name = r.has({key, "name"}) ? r.string({key, "name"}) : default_name;
  if (r.has({key, "curve"}) && !r.at({key, "curve"}).is_null()) p.curve = read_curve(r, {key, "curve"});
  p.renewal.initial_delay = read_distribution(r, {key, "initial_delay"});
  p.renewal.cycle = read_distribution(r, {key, "cycle"});
  r.anchored({key, "cycle"}, [&] {
    check_advances(p.renewal);
    return 0;
  });
  return p;
}

}  // namespace detail

inline RunMode parse_run_mode(const std::string& s) {
  if (s == "deterministic") return RunMode::deterministic;
  if (s == "monte-carlo") return RunMode::monte_carlo;
  if (s == "analytic") return RunMode::analytic;
  if (s == "all") return RunMode::all;
  throw validation_error("unknown mode \"" + s + "\" (deterministic, monte-carlo, analytic, all)");
}

/// Parses and validates a scenario document.
inline ScenarioFile load_scenario(std::string_view text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("malformed JSON: ") + e.what(),
                           detail::LineLocator(text).line_at(e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!root.is_object()) throw validation_error("top level must be an object", 1);

  detail::Reader r(root, text);
  r.only_keys({}, {"schema_version", "time_unit", "player_a", "player_b", "t_star", "thresholds", "trace_condition",
                   "mode", "replications", "seed"});
  const json& version = r.require({"schema_version"});
  if (!version.is_number_integer() || version.get<long long>() != 1)
    r.fail({"schema_version"}, "only schema_version 1 is supported");

  ScenarioFile f;
  DuelScenario& sc = f.scenario;
  if (r.has({"time_unit"})) sc.time_unit = r.string({"time_unit"});
  sc.a = detail::read_player(r, "player_a", "A");
  sc.b = detail::read_player(r, "player_b", "B");

  if (r.has({"t_star"})) {
    const double t = r.number({"t_star"});
    if (!(t >= 0.0)) r.fail({"t_star"}, "must be >= 0");
    sc.t_star_override = t;
  } else if (!(sc.a.curve && sc.b.curve)) {
    throw validation_error("t_star is required unless both players declare a curve",
                           detail::LineLocator(text).line_of({!sc.a.curve ? "player_a" : "player_b"}));
  }
  if (r.has({"thresholds"})) {
    r.only_keys({"thresholds"}, {"a", "b"});
    for (const char* k : {"a", "b"}) {
      if (!r.has({"thresholds", k})) continue;
      const double v = r.number({"thresholds", k});
      if (!(v >= 0.0)) r.fail({"thresholds", k}, "must be >= 0");
      (k[0] == 'a' ? sc.threshold_a : sc.threshold_b) = v;
    }
  }
  if (r.has({"trace_condition"})) {
    if (!r.at({"trace_condition"}).is_boolean()) r.fail({"trace_condition"}, "expected true or false");
    sc.trace_condition = r.at({"trace_condition"}).get<bool>();
  }
  if (r.has({"mode"})) f.mode = r.anchored({"mode"}, [&] { return parse_run_mode(r.string({"mode"})); });
  if (r.has({"replications"})) f.replications = r.count({"replications"});
  if (r.has({"seed"})) f.seed = r.count({"seed"});
  if (f.replications < 1 && (f.mode == RunMode::monte_carlo || f.mode == RunMode::all))
    r.fail({"replications"}, "must be >= 1 in monte-carlo mode");
  return f;
}

inline ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

namespace detail {

inline json to_json(const Distribution& d) {
  if (d.is_deterministic()) return {{"kind", "deterministic"}, {"value", d.mean()}};
  return {{"kind", "exponential"}, {"rate", std::get<Distribution::Exponential>(d.law()).rate}};
}

inline json to_json(const SuccessCurve& c) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SuccessCurve::ExponentialSaturation>) {
          return {{"kind", "exponential-saturation"}, {"rate", p.rate}};
        } else if constexpr (std::is_same_v<P, SuccessCurve::Logistic>) {
          return {{"kind", "logistic"}, {"midpoint", p.midpoint}, {"steepness", p.steepness}};
        } else if constexpr (std::is_same_v<P, SuccessCurve::LinearRamp>) {
          return {{"kind", "linear-ramp"}, {"t_ramp", p.t_ramp}};
        } else {
          json knots = json::array();
          for (const auto& k : p.knots) knots.push_back({k.t, k.p});
          return {{"kind", "tabulated"}, {"knots", knots}};
        }
      },
      c.params());
}

inline json to_json(const Player& p) {
  json j = {{"name", p.name}, {"initial_delay", to_json(p.renewal.initial_delay)}, {"cycle", to_json(p.renewal.cycle)}};
  if (p.curve) j["curve"] = to_json(*p.curve);
  return j;
}

}  // namespace detail

/// Serializes a scenario file; load_scenario(emit_scenario(f)) reproduces f.
inline std::string emit_scenario(const ScenarioFile& f) {
  using detail::json;
  const DuelScenario& sc = f.scenario;
  json j;
  j["schema_version"] = 1;
  j["time_unit"] = sc.time_unit;
  j["player_a"] = detail::to_json(sc.a);
  j["player_b"] = detail::to_json(sc.b);
  if (sc.t_star_override) j["t_star"] = *sc.t_star_override;
  if (sc.threshold_a || sc.threshold_b) {
    j["thresholds"] = json::object();
    if (sc.threshold_a) j["thresholds"]["a"] = *sc.threshold_a;
    if (sc.threshold_b) j["thresholds"]["b"] = *sc.threshold_b;
  }
  j["trace_condition"] = sc.trace_condition;
  j["mode"] = to_string(f.mode);
  j["replications"] = f.replications;
  j["seed"] = f.seed;
  return j.dump(2) + "\n";
}

}  // namespace duel

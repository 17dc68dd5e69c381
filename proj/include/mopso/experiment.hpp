#pragma once

// JSON ingestion for scenarios and experiments. Unknown keys are rejected and
// every error names the offending key path.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mopso/convergence.hpp"
#include "mopso/errors.hpp"
#include "mopso/scenario.hpp"
#include "mopso/swarm.hpp"

namespace mopso {

using Json = nlohmann::json;

struct ExperimentConfig {
  std::string scenario_source;  // path as written in the config, or "<inline>"
  Scenario scenario;
  MopsoConfig mopso;
  ConvergenceConfig convergence;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  std::vector<std::size_t> snapshot_iterations{10, 50, 100, 400, 1000};
  // Keep iterating to max_iterations after the stop rule fires, still
  // recording the iteration at which it fired.
  bool continue_after_stop = false;
  std::vector<double> anchors;  // empty: 25/50/75 percentiles of the final front
  std::filesystem::path output_dir = "out";
  std::size_t threads = 0;  // 0: hardware concurrency
  bool record_timings = false;

  void validate() const {
    scenario.validate();
    mopso.validate();
    convergence.validate();
    if (trials < 1) {
      throw LoadError("trials", "must be at least 1");
    }
    for (std::size_t t : snapshot_iterations) {
      if (t > mopso.max_iterations) {
        throw LoadError("snapshot_iterations",
                        "iteration " + std::to_string(t) + " exceeds max_iterations");
      }
    }
  }
};

namespace detail {

inline std::string join_key(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) {
    throw LoadError(where, "expected an object");
  }
}

inline void reject_unknown(const Json& j, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      known = known || key == a;
    }
    if (!known) {
      throw LoadError(join_key(where, key), "unknown key");
    }
  }
}

inline const Json& required(const Json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw LoadError(join_key(where, key), "missing required key");
  }
  return *it;
}

inline double as_number(const Json& j, const std::string& key) {
  if (!j.is_number()) {
    throw LoadError(key, "expected a number");
  }
  return j.get<double>();
}

inline std::uint64_t as_count(const Json& j, const std::string& key) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw LoadError(key, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline bool as_bool(const Json& j, const std::string& key) {
  if (!j.is_boolean()) {
    throw LoadError(key, "expected true or false");
  }
  return j.get<bool>();
}

inline std::string as_string(const Json& j, const std::string& key) {
  if (!j.is_string()) {
    throw LoadError(key, "expected a string");
  }
  return j.get<std::string>();
}

inline double length_scale(const Json& j, const std::string& where) {
  auto it = j.find("unit");
  if (it == j.end()) {
    return 1.0;
  }
  const std::string unit = as_string(*it, join_key(where, "unit"));
  if (unit == "m") {
    return 1.0;
  }
  if (unit == "km") {
    return 1000.0;
  }
  throw LoadError(join_key(where, "unit"), "expected \"m\" or \"km\"");
}

inline Rectangle parse_rectangle(const Json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where, {"x_min", "x_max", "y_min", "y_max", "unit"});
  const double scale = length_scale(j, where);
  Rectangle r{as_number(required(j, where, "x_min"), join_key(where, "x_min")) * scale,
              as_number(required(j, where, "x_max"), join_key(where, "x_max")) * scale,
              as_number(required(j, where, "y_min"), join_key(where, "y_min")) * scale,
              as_number(required(j, where, "y_max"), join_key(where, "y_max")) * scale};
  if (!(r.x_min < r.x_max)) {
    throw LoadError(where, "x_min must be below x_max");
  }
  if (!(r.y_min < r.y_max)) {
    throw LoadError(where, "y_min must be below y_max");
  }
  return r;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw LoadError("", "cannot open " + path.string());
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw LoadError("", path.string() + ": " + e.what());
  }
}

template <class Enum>
Enum parse_choice(const Json& j, const std::string& key,
                  std::initializer_list<std::pair<const char*, Enum>> choices) {
  const std::string value = as_string(j, key);
  std::string expected;
  for (const auto& [name, e] : choices) {
    if (value == name) {
      return e;
    }
    expected += expected.empty() ? name : std::string(", ") + name;
  }
  throw LoadError(key, "expected one of " + expected);
}

}  // namespace detail

// Scenario document:
//   deployment_region {x_min, x_max, y_min, y_max, unit}
//   regions [{index?, bounds {.., unit}, grid? {nx, ny}}]
//   radar {powers_w [..], gains [{value, unit: "dB" | "linear"}]}
//   min_separation_m
inline Scenario parse_scenario(const Json& j) {
  using namespace detail;
  require_object(j, "");
  reject_unknown(j, "", {"deployment_region", "regions", "radar", "min_separation_m"});
  Scenario s;
  s.deployment_region = parse_rectangle(required(j, "", "deployment_region"), "deployment_region");

  const Json& radar = required(j, "", "radar");
  require_object(radar, "radar");
  reject_unknown(radar, "radar", {"powers_w", "gains"});
  const Json& powers = required(radar, "radar", "powers_w");
  if (!powers.is_array() || powers.empty()) {
    throw LoadError("radar.powers_w", "expected a non-empty array");
  }
  for (const auto& p : powers) {
    const double w = as_number(p, "radar.powers_w");
    if (!(w > 0.0)) {
      throw LoadError("radar.powers_w", "transmit powers must be strictly positive");
    }
    s.radar.transmit_powers.push_back(w);
  }
  const Json& gains = required(radar, "radar", "gains");
  if (!gains.is_array() || gains.size() != powers.size()) {
    throw LoadError("radar.gains", "expected one gain per entry of powers_w");
  }
  for (const auto& g : gains) {
    require_object(g, "radar.gains");
    reject_unknown(g, "radar.gains", {"value", "unit"});
    const double value = as_number(required(g, "radar.gains", "value"), "radar.gains.value");
    const std::string unit = as_string(required(g, "radar.gains", "unit"), "radar.gains.unit");
    double linear = 0.0;
    if (unit == "dB") {
      linear = db_to_linear(value);
    } else if (unit == "linear") {
      linear = value;
    } else {
      throw LoadError("radar.gains.unit", "expected \"dB\" or \"linear\"");
    }
    if (!(linear > 0.0) || !std::isfinite(linear)) {
      throw LoadError("radar.gains.value", "gain must be strictly positive");
    }
    s.radar.gains.push_back(linear);
  }

  const Json& regions = required(j, "", "regions");
  if (!regions.is_array() || regions.empty()) {
    throw LoadError("regions", "expected a non-empty array");
  }
  std::vector<bool> seen(regions.size(), false);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const std::string where = "regions[" + std::to_string(r) + "]";
    const Json& region = regions[r];
    require_object(region, where);
    reject_unknown(region, where, {"index", "bounds", "grid"});
    std::size_t index = r + 1;
    if (auto it = region.find("index"); it != region.end()) {
      index = as_count(*it, join_key(where, "index"));
    }
    if (index < 1 || index > regions.size() || seen[index - 1]) {
      throw LoadError(join_key(where, "index"), "region indices must be 1..M without duplicates");
    }
    seen[index - 1] = true;
    const Rectangle bounds = parse_rectangle(required(region, where, "bounds"), join_key(where, "bounds"));
    std::size_t nx = 20;
    std::size_t ny = 20;
    if (auto it = region.find("grid"); it != region.end()) {
      const std::string gw = join_key(where, "grid");
      require_object(*it, gw);
      reject_unknown(*it, gw, {"nx", "ny"});
      nx = as_count(required(*it, gw, "nx"), join_key(gw, "nx"));
      ny = as_count(required(*it, gw, "ny"), join_key(gw, "ny"));
      if (nx == 0 || ny == 0) {
        throw LoadError(gw, "cell counts must be at least 1");
      }
    }
    s.regions.push_back(InterferenceRegion::make(static_cast<int>(index), bounds, nx, ny));
  }
  std::sort(s.regions.begin(), s.regions.end(),
            [](const InterferenceRegion& a, const InterferenceRegion& b) { return a.index < b.index; });

  if (auto it = j.find("min_separation_m"); it != j.end()) {
    s.min_separation = as_number(*it, "min_separation_m");
  }
  if (!(s.min_separation > 0.0)) {
    throw LoadError("min_separation_m", "must be strictly positive");
  }
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  try {
    return parse_scenario(detail::read_json_file(path));
  } catch (const LoadError& e) {
    throw LoadError(e.key(), std::string(e.what()) + " (in " + path.string() + ")");
  }
}

inline MopsoConfig parse_mopso(const Json& j) {
  using namespace detail;
  const std::string w = "mopso";
  require_object(j, w);
  reject_unknown(j, w,
                 {"swarm_size", "inertia", "c1", "c2", "v_max", "archive_capacity", "max_iterations",
                  "coefficient_draw", "leader_selection"});
  MopsoConfig c;
  c.v_max = 4000.0;
  if (auto it = j.find("swarm_size"); it != j.end()) c.swarm_size = as_count(*it, "mopso.swarm_size");
  if (auto it = j.find("inertia"); it != j.end()) c.inertia = as_number(*it, "mopso.inertia");
  if (auto it = j.find("c1"); it != j.end()) c.c1 = as_number(*it, "mopso.c1");
  if (auto it = j.find("c2"); it != j.end()) c.c2 = as_number(*it, "mopso.c2");
  if (auto it = j.find("v_max"); it != j.end()) c.v_max = as_number(*it, "mopso.v_max");
  if (auto it = j.find("archive_capacity"); it != j.end() && !it->is_null()) {
    c.archive_capacity = as_count(*it, "mopso.archive_capacity");
  }
  if (auto it = j.find("max_iterations"); it != j.end()) {
    c.max_iterations = as_count(*it, "mopso.max_iterations");
  }
  if (auto it = j.find("coefficient_draw"); it != j.end()) {
    c.coefficient_draw = parse_choice<CoefficientDraw>(
        *it, "mopso.coefficient_draw",
        {{"per_particle", CoefficientDraw::PerParticle}, {"per_dimension", CoefficientDraw::PerDimension}});
  }
  if (auto it = j.find("leader_selection"); it != j.end()) {
    c.leader_selection = parse_choice<LeaderSelection>(
        *it, "mopso.leader_selection",
        {{"tournament", LeaderSelection::Tournament}, {"roulette", LeaderSelection::Roulette}});
  }
  if (c.swarm_size < 2) throw LoadError("mopso.swarm_size", "must be at least 2");
  if (!(c.inertia >= 0.0)) throw LoadError("mopso.inertia", "must be non-negative");
  if (!(c.c1 >= 0.0)) throw LoadError("mopso.c1", "must be non-negative");
  if (!(c.c2 >= 0.0)) throw LoadError("mopso.c2", "must be non-negative");
  if (!(c.v_max > 0.0)) throw LoadError("mopso.v_max", "must be positive");
  if (c.max_iterations < 1) throw LoadError("mopso.max_iterations", "must be at least 1");
  if (c.archive_capacity && *c.archive_capacity == 0) {
    throw LoadError("mopso.archive_capacity", "must be at least 1 or null");
  }
  return c;
}

inline DistanceMode parse_mode(const std::string& text, const std::string& key) {
  return detail::parse_choice<DistanceMode>(
      Json(text), key, {{"max", DistanceMode::Max}, {"min", DistanceMode::Min}, {"avg", DistanceMode::Avg}});
}

inline Cadence parse_cadence(const std::string& text, const std::string& key) {
  return detail::parse_choice<Cadence>(Json(text), key,
                                       {{"every_h", Cadence::EveryH},
                                        {"every-h", Cadence::EveryH},
                                        {"every_iteration", Cadence::EveryIteration},
                                        {"every-iter", Cadence::EveryIteration}});
}

inline ConvergenceConfig parse_convergence(const Json& j) {
  using namespace detail;
  const std::string w = "convergence";
  require_object(j, w);
  reject_unknown(j, w, {"step", "threshold", "mode", "cadence", "normalize", "relative_threshold"});
  ConvergenceConfig c;
  if (auto it = j.find("step"); it != j.end()) c.step = as_count(*it, "convergence.step");
  if (auto it = j.find("threshold"); it != j.end()) c.threshold = as_number(*it, "convergence.threshold");
  if (auto it = j.find("mode"); it != j.end()) c.mode = parse_mode(as_string(*it, "convergence.mode"), "convergence.mode");
  if (auto it = j.find("cadence"); it != j.end()) {
    c.cadence = parse_cadence(as_string(*it, "convergence.cadence"), "convergence.cadence");
  }
  if (auto it = j.find("normalize"); it != j.end()) c.normalize = as_bool(*it, "convergence.normalize");
  if (auto it = j.find("relative_threshold"); it != j.end()) {
    c.relative_threshold = as_bool(*it, "convergence.relative_threshold");
  }
  if (c.step < 1) throw LoadError("convergence.step", "must be at least 1");
  if (!(c.threshold >= 0.0)) throw LoadError("convergence.threshold", "must be non-negative");
  return c;
}

// `base_dir` resolves a relative scenario path.
inline ExperimentConfig parse_experiment(const Json& j, const std::filesystem::path& base_dir) {
  using namespace detail;
  require_object(j, "");
  reject_unknown(j, "",
                 {"scenario", "mopso", "convergence", "trials", "base_seed", "snapshot_iterations",
                  "continue_after_stop", "anchors", "output_dir", "threads"});
  ExperimentConfig cfg;
  const Json& scenario = required(j, "", "scenario");
  if (scenario.is_string()) {
    cfg.scenario_source = scenario.get<std::string>();
    std::filesystem::path p(cfg.scenario_source);
    cfg.scenario = load_scenario(p.is_absolute() ? p : base_dir / p);
  } else if (scenario.is_object()) {
    cfg.scenario_source = "<inline>";
    try {
      cfg.scenario = parse_scenario(scenario);
    } catch (const LoadError& e) {
      throw LoadError(join_key("scenario", e.key()), e.what());
    }
  } else {
    throw LoadError("scenario", "expected a file path or an inline scenario object");
  }

  cfg.mopso = parse_mopso(j.value("mopso", Json::object()));
  cfg.convergence = parse_convergence(j.value("convergence", Json::object()));
  if (auto it = j.find("trials"); it != j.end()) cfg.trials = as_count(*it, "trials");
  if (auto it = j.find("base_seed"); it != j.end()) cfg.base_seed = as_count(*it, "base_seed");
  if (auto it = j.find("snapshot_iterations"); it != j.end()) {
    if (!it->is_array()) throw LoadError("snapshot_iterations", "expected an array");
    cfg.snapshot_iterations.clear();
    for (const auto& t : *it) cfg.snapshot_iterations.push_back(as_count(t, "snapshot_iterations"));
  }
  if (auto it = j.find("continue_after_stop"); it != j.end()) {
    cfg.continue_after_stop = as_bool(*it, "continue_after_stop");
  }
  if (auto it = j.find("anchors"); it != j.end()) {
    if (!it->is_array()) throw LoadError("anchors", "expected an array");
    for (const auto& a : *it) cfg.anchors.push_back(as_number(a, "anchors"));
  }
  if (auto it = j.find("output_dir"); it != j.end()) cfg.output_dir = as_string(*it, "output_dir");
  if (auto it = j.find("threads"); it != j.end()) cfg.threads = as_count(*it, "threads");

  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw LoadError("", e.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw LoadError("", "config file not found: " + path.string());
  }
  return parse_experiment(detail::read_json_file(path), path.parent_path());
}

inline const char* to_string(CoefficientDraw d) {
  return d == CoefficientDraw::PerParticle ? "per_particle" : "per_dimension";
}

inline const char* to_string(LeaderSelection s) {
  return s == LeaderSelection::Tournament ? "tournament" : "roulette";
}

// Echo of the run-defining settings; the output directory and thread count
// are left out so identical experiments produce identical summaries.
inline Json to_json(const ExperimentConfig& cfg) {
  Json mopso{{"swarm_size", cfg.mopso.swarm_size},
             {"inertia", cfg.mopso.inertia},
             {"c1", cfg.mopso.c1},
             {"c2", cfg.mopso.c2},
             {"v_max", cfg.mopso.v_max},
             {"archive_capacity", cfg.mopso.archive_capacity ? Json(*cfg.mopso.archive_capacity) : Json(nullptr)},
             {"max_iterations", cfg.mopso.max_iterations},
             {"coefficient_draw", to_string(cfg.mopso.coefficient_draw)},
             {"leader_selection", to_string(cfg.mopso.leader_selection)}};
  Json convergence{{"step", cfg.convergence.step},
                   {"threshold", cfg.convergence.threshold},
                   {"mode", to_string(cfg.convergence.mode)},
                   {"cadence", to_string(cfg.convergence.cadence)},
                   {"normalize", cfg.convergence.normalize},
                   {"relative_threshold", cfg.convergence.relative_threshold}};
  return Json{{"scenario", cfg.scenario_source},
              {"antennas", cfg.scenario.antenna_count()},
              {"regions", cfg.scenario.objective_count()},
              {"mopso", mopso},
              {"convergence", convergence},
              {"trials", cfg.trials},
              {"base_seed", cfg.base_seed},
              {"snapshot_iterations", cfg.snapshot_iterations},
              {"continue_after_stop", cfg.continue_after_stop},
              {"anchors", cfg.anchors}};
}

}  // namespace mopso

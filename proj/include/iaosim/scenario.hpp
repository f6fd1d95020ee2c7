#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iaosim/netmodel.hpp"
#include "iaosim/statespace.hpp"
#include "iaosim/timesim.hpp"

#include <nlohmann/json_fwd.hpp>

namespace iaosim {

enum class KickKind { None, FirstGenerator, AreaAntisymmetric };

struct InitialCondition {
  KickKind kick = KickKind::FirstGenerator;
  double magnitude = 0.01;                // p.u., used by kicks
  std::map<std::string, double> values;   // state label -> value, kick = None
};

struct ResonanceSpec {
  std::string bus;
  double amplitude = 0.05;           // p.u./s
  std::optional<double> frequency;   // rad/s; absent = identify automatically
};

struct AnalysisOptions {
  double zero_tol = 1e-6;
  double participation_threshold = 0.1;
};

struct SimulationOptions {
  std::optional<double> step;  // s; absent = min(0.01/f_max, 0.01)
  double horizon = 50.0;       // s
  InitialCondition initial;
  InputSignal input;
  std::optional<ResonanceSpec> resonance;
};

struct Scenario {
  std::string name;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::map<std::string, std::vector<std::string>> areas;
  ModelForm form = ModelForm::Reduced;
  std::map<std::string, double> angle_override;    // bus id -> rad
  std::map<std::string, double> voltage_override;  // bus id -> p.u.
  AnalysisOptions analysis;
  SimulationOptions simulation;
};

/// Parses and validates a scenario document, reporting all schema violations
/// with their field paths in one pass. Throws ParseError or SchemaError.
Scenario parse_scenario_text(const std::string& text);

/// Reads `source` as a builtin scenario name or a JSON file path.
Scenario load_scenario(const std::string& source);

nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);

/// Scenario resolved into model objects.
struct BuiltScenario {
  NetworkModel network;
  OperatingPoint op;
  ReducedNetwork reduced;
  StateSpaceModel model;
};

BuiltScenario build_scenario(const Scenario& scenario);

/// Initial state vector per the scenario's initial-condition spec.
Vector initial_state(const Scenario& scenario, const BuiltScenario& built);

}  // namespace iaosim

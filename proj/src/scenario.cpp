#include "iaosim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iaosim/error.hpp"

namespace iaosim {

using json = nlohmann::ordered_json;

namespace {

class Collector {
 public:
  void add(const std::string& path, const std::string& what) {
    issues_.push_back(path + ": " + what);
  }
  bool empty() const { return issues_.empty(); }
  [[noreturn]] void raise() const {
    std::ostringstream msg;
    msg << "invalid scenario:";
    for (const std::string& s : issues_) msg << "\n  " << s;
    throw Error(ErrorKind::SchemaError, msg.str());
  }

 private:
  std::vector<std::string> issues_;
};

double require_number(const json& obj, const std::string& key, const std::string& path,
                      Collector& errs, double fallback = 0.0) {
  if (!obj.contains(key)) {
    errs.add(path + "." + key, "missing");
    return fallback;
  }
  if (!obj[key].is_number()) {
    errs.add(path + "." + key, "must be a number");
    return fallback;
  }
  return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& path,
                           Collector& errs) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    errs.add(path + "." + key, "missing or not a string");
    return {};
  }
  return obj[key].get<std::string>();
}

double optional_number(const json& obj, const std::string& key, double fallback,
                       const std::string& path, Collector& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    errs.add(path + "." + key, "must be a number");
    return fallback;
  }
  return obj[key].get<double>();
}

void parse_generators(const json& doc, Scenario& s, Collector& errs) {
  if (!doc.contains("generators")) return;
  if (!doc["generators"].is_array()) {
    errs.add("generators", "must be an array");
    return;
  }
  std::size_t gi = 0;
  for (const json& g : doc["generators"]) {
    const std::string path = "generators[" + std::to_string(gi++) + "]";
    if (!g.is_object()) {
      errs.add(path, "must be an object");
      continue;
    }
    const std::string bus = require_string(g, "bus", path, errs);
    GeneratorParams p;
    p.inertia = require_number(g, "inertia", path, errs, p.inertia);
    p.damping = optional_number(g, "damping", 0.0, path, errs);
    p.turbine_time_constant = optional_number(g, "turbine_time_constant", 1e6, path, errs);
    p.governor_time_constant = optional_number(g, "governor_time_constant", 1e6, path, errs);
    p.turbine_gain = optional_number(g, "turbine_gain", 1.0, path, errs);
    p.droop = optional_number(g, "droop", 0.05, path, errs);
    if (!(p.inertia > 0)) errs.add(path + ".inertia", "must be > 0");
    if (p.damping < 0) errs.add(path + ".damping", "must be >= 0");
    if (!(p.turbine_time_constant > 0)) errs.add(path + ".turbine_time_constant", "must be > 0");
    if (!(p.governor_time_constant > 0)) errs.add(path + ".governor_time_constant", "must be > 0");
    if (!(p.droop > 0)) errs.add(path + ".droop", "must be > 0");

    bool placed = false;
    for (Bus& b : s.buses) {
      if (b.id == bus) {
        b.kind = BusKind::Generator;
        b.generator = p;
        placed = true;
        break;
      }
    }
    if (!placed) errs.add(path + ".bus", "references unknown bus '" + bus + "'");
  }
}

void parse_signal(const json& sim, SimulationOptions& out, Collector& errs) {
  if (!sim.contains("input")) return;
  const json& in = sim["input"];
  const std::string path = "simulation.input";
  if (!in.is_object()) {
    errs.add(path, "must be an object");
    return;
  }
  const std::string kind = require_string(in, "kind", path, errs);
  if (kind == "zero" || kind.empty()) {
    out.input.kind = SignalKind::Zero;
    return;
  }
  if (kind == "step") {
    out.input.kind = SignalKind::Step;
  } else if (kind == "sinusoid") {
    out.input.kind = SignalKind::Sinusoid;
  } else {
    errs.add(path + ".kind", "must be zero, step, or sinusoid");
    return;
  }
  out.input.amplitude = require_number(in, "amplitude", path, errs);
  out.input.start = optional_number(in, "start", 0.0, path, errs);
  out.input.bus = require_string(in, "bus", path, errs);
  if (out.input.kind == SignalKind::Sinusoid) {
    out.input.frequency = require_number(in, "frequency", path, errs);
    if (!(out.input.frequency > 0)) errs.add(path + ".frequency", "must be > 0");
  }
}

void parse_initial(const json& sim, SimulationOptions& out, Collector& errs) {
  if (!sim.contains("initial")) return;
  const json& init = sim["initial"];
  const std::string path = "simulation.initial";
  if (!init.is_object()) {
    errs.add(path, "must be an object");
    return;
  }
  if (init.contains("kick")) {
    const std::string kick = require_string(init, "kick", path, errs);
    if (kick == "first-generator") {
      out.initial.kick = KickKind::FirstGenerator;
    } else if (kick == "area-antisymmetric") {
      out.initial.kick = KickKind::AreaAntisymmetric;
    } else {
      errs.add(path + ".kick", "must be first-generator or area-antisymmetric");
    }
    out.initial.magnitude = optional_number(init, "magnitude", 0.01, path, errs);
    return;
  }
  out.initial.kick = KickKind::None;
  for (const auto& [key, value] : init.items()) {
    if (!value.is_number()) {
      errs.add(path + "." + key, "must be a number");
      continue;
    }
    out.initial.values[key] = value.get<double>();
  }
}

Scenario parse_document(const json& doc) {
  Collector errs;
  Scenario s;

  if (!doc.is_object()) {
    errs.add("$", "document must be a JSON object");
    errs.raise();
  }
  s.name = doc.value("name", std::string{});

  if (!doc.contains("buses") || !doc["buses"].is_array() || doc["buses"].empty()) {
    errs.add("buses", "must be a non-empty array");
  } else {
    std::size_t bi = 0;
    for (const json& b : doc["buses"]) {
      const std::string path = "buses[" + std::to_string(bi++) + "]";
      Bus bus;
      if (!b.is_object()) {
        errs.add(path, "must be an object");
        continue;
      }
      bus.id = require_string(b, "id", path, errs);
      const std::string kind = b.value("kind", std::string{"generator"});
      if (kind == "generator") {
        bus.kind = BusKind::Generator;
      } else if (kind == "load") {
        bus.kind = BusKind::LoadOnly;
      } else {
        errs.add(path + ".kind", "must be generator or load");
      }
      bus.load = optional_number(b, "load", 0.0, path, errs);
      s.buses.push_back(std::move(bus));
    }
  }

  if (doc.contains("lines")) {
    if (!doc["lines"].is_array()) {
      errs.add("lines", "must be an array");
    } else {
      std::size_t li = 0;
      for (const json& l : doc["lines"]) {
        const std::string path = "lines[" + std::to_string(li++) + "]";
        Line line;
        if (!l.is_object()) {
          errs.add(path, "must be an object");
          continue;
        }
        line.from = require_string(l, "from", path, errs);
        line.to = require_string(l, "to", path, errs);
        line.reactance = require_number(l, "reactance", path, errs);
        if (!(line.reactance > 0)) errs.add(path + ".reactance", "must be > 0");
        s.lines.push_back(std::move(line));
      }
    }
  }

  if (!doc.contains("areas") || !doc["areas"].is_object() || doc["areas"].empty()) {
    errs.add("areas", "must be a non-empty object of area id -> bus id list");
  } else {
    for (const auto& [area, members] : doc["areas"].items()) {
      if (!members.is_array()) {
        errs.add("areas." + area, "must be an array of bus ids");
        continue;
      }
      std::vector<std::string> ids;
      for (const json& m : members) {
        if (!m.is_string()) {
          errs.add("areas." + area, "bus ids must be strings");
          continue;
        }
        ids.push_back(m.get<std::string>());
      }
      s.areas[area] = std::move(ids);
    }
  }

  parse_generators(doc, s, errs);

  if (doc.contains("model")) {
    const json& mdl = doc["model"];
    if (!mdl.is_object()) {
      errs.add("model", "must be an object");
    } else {
      const std::string form = mdl.value("form", std::string{"reduced"});
      if (form == "reduced") {
        s.form = ModelForm::Reduced;
      } else if (form == "full") {
        s.form = ModelForm::Full;
      } else {
        errs.add("model.form", "must be reduced or full");
      }
      if (mdl.contains("operating_point")) {
        const json& op = mdl["operating_point"];
        if (!op.is_object()) {
          errs.add("model.operating_point", "must be an object");
        } else {
          for (const auto& [key, field] :
               {std::pair<const char*, int>{"angles_rad", 0}, {"voltages_pu", 1}}) {
            if (!op.contains(key)) continue;
            if (!op[key].is_object()) {
              errs.add(std::string("model.operating_point.") + key, "must be an object");
              continue;
            }
            for (const auto& [bus, value] : op[key].items()) {
              if (!value.is_number()) {
                errs.add(std::string("model.operating_point.") + key + "." + bus,
                         "must be a number");
                continue;
              }
              (field == 0 ? s.angle_override : s.voltage_override)[bus] = value.get<double>();
            }
          }
        }
      }
    }
  }

  if (doc.contains("analysis")) {
    const json& an = doc["analysis"];
    if (!an.is_object()) {
      errs.add("analysis", "must be an object");
    } else {
      s.analysis.zero_tol = optional_number(an, "zero_tol", 1e-6, "analysis", errs);
      s.analysis.participation_threshold =
          optional_number(an, "participation_threshold", 0.1, "analysis", errs);
      if (!(s.analysis.zero_tol > 0)) errs.add("analysis.zero_tol", "must be > 0");
      if (!(s.analysis.participation_threshold > 0) || s.analysis.participation_threshold > 1) {
        errs.add("analysis.participation_threshold", "must be in (0, 1]");
      }
    }
  }

  if (doc.contains("simulation")) {
    const json& sim = doc["simulation"];
    if (!sim.is_object()) {
      errs.add("simulation", "must be an object");
    } else {
      if (sim.contains("step")) {
        const double step = require_number(sim, "step", "simulation", errs);
        if (!(step > 0)) {
          errs.add("simulation.step", "must be > 0");
        } else {
          s.simulation.step = step;
        }
      }
      s.simulation.horizon = optional_number(sim, "horizon", 50.0, "simulation", errs);
      if (!(s.simulation.horizon > 0)) errs.add("simulation.horizon", "must be > 0");
      parse_initial(sim, s.simulation, errs);
      parse_signal(sim, s.simulation, errs);
      if (sim.contains("resonance")) {
        const json& res = sim["resonance"];
        if (!res.is_object()) {
          errs.add("simulation.resonance", "must be an object");
        } else {
          ResonanceSpec spec;
          spec.bus = require_string(res, "bus", "simulation.resonance", errs);
          spec.amplitude = optional_number(res, "amplitude", 0.05, "simulation.resonance", errs);
          if (!(spec.amplitude > 0)) errs.add("simulation.resonance.amplitude", "must be > 0");
          if (res.contains("frequency")) {
            const double f = require_number(res, "frequency", "simulation.resonance", errs);
            if (!(f > 0)) {
              errs.add("simulation.resonance.frequency", "must be > 0");
            } else {
              spec.frequency = f;
            }
          }
          s.simulation.resonance = std::move(spec);
        }
      }
    }
  }

  // cross references
  const auto has_bus = [&](const std::string& id) {
    return std::any_of(s.buses.begin(), s.buses.end(),
                       [&](const Bus& b) { return b.id == id; });
  };
  for (const auto& [area, members] : s.areas) {
    for (const std::string& id : members) {
      if (!has_bus(id)) errs.add("areas." + area, "references unknown bus '" + id + "'");
    }
  }
  if (s.simulation.input.kind != SignalKind::Zero && !has_bus(s.simulation.input.bus)) {
    errs.add("simulation.input.bus", "references unknown bus '" + s.simulation.input.bus + "'");
  }
  if (s.simulation.resonance && !has_bus(s.simulation.resonance->bus)) {
    errs.add("simulation.resonance.bus",
             "references unknown bus '" + s.simulation.resonance->bus + "'");
  }
  for (const auto& [bus, _] : s.angle_override) {
    if (!has_bus(bus)) errs.add("model.operating_point.angles_rad", "unknown bus '" + bus + "'");
  }
  for (const auto& [bus, _] : s.voltage_override) {
    if (!has_bus(bus)) errs.add("model.operating_point.voltages_pu", "unknown bus '" + bus + "'");
  }

  if (!errs.empty()) errs.raise();
  return s;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_document(doc);
}

Scenario load_scenario(const std::string& source) {
  const auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), source) != names.end()) {
    return builtin_scenario(source);
  }
  std::ifstream in(source);
  if (!in) {
    throw Error(ErrorKind::IoError,
                "cannot open scenario '" + source + "' (not a builtin name or readable file)");
  }
  std::ostringstream text;
  text << in.rdbuf();
  Scenario s = parse_scenario_text(text.str());
  if (s.name.empty()) s.name = source;
  return s;
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["buses"] = json::array();
  for (const Bus& b : s.buses) {
    json jb;
    jb["id"] = b.id;
    jb["kind"] = b.kind == BusKind::Generator ? "generator" : "load";
    jb["load"] = b.load;
    doc["buses"].push_back(std::move(jb));
  }
  doc["lines"] = json::array();
  for (const Line& l : s.lines) {
    doc["lines"].push_back({{"from", l.from}, {"to", l.to}, {"reactance", l.reactance}});
  }
  doc["areas"] = json::object();
  for (const auto& [area, members] : s.areas) doc["areas"][area] = members;
  doc["generators"] = json::array();
  for (const Bus& b : s.buses) {
    if (!b.generator) continue;
    const GeneratorParams& p = *b.generator;
    doc["generators"].push_back({{"bus", b.id},
                                 {"inertia", p.inertia},
                                 {"damping", p.damping},
                                 {"turbine_time_constant", p.turbine_time_constant},
                                 {"governor_time_constant", p.governor_time_constant},
                                 {"turbine_gain", p.turbine_gain},
                                 {"droop", p.droop}});
  }
  json mdl;
  mdl["form"] = s.form == ModelForm::Reduced ? "reduced" : "full";
  if (!s.angle_override.empty() || !s.voltage_override.empty()) {
    json op;
    if (!s.angle_override.empty()) {
      for (const auto& [bus, v] : s.angle_override) op["angles_rad"][bus] = v;
    }
    if (!s.voltage_override.empty()) {
      for (const auto& [bus, v] : s.voltage_override) op["voltages_pu"][bus] = v;
    }
    mdl["operating_point"] = std::move(op);
  }
  doc["model"] = std::move(mdl);
  doc["analysis"] = {{"zero_tol", s.analysis.zero_tol},
                     {"participation_threshold", s.analysis.participation_threshold}};
  json sim;
  if (s.simulation.step) sim["step"] = *s.simulation.step;
  sim["horizon"] = s.simulation.horizon;
  if (s.simulation.initial.kick == KickKind::None) {
    json init = json::object();
    for (const auto& [label, v] : s.simulation.initial.values) init[label] = v;
    sim["initial"] = std::move(init);
  } else {
    sim["initial"] = {{"kick", s.simulation.initial.kick == KickKind::FirstGenerator
                                   ? "first-generator"
                                   : "area-antisymmetric"},
                      {"magnitude", s.simulation.initial.magnitude}};
  }
  json in;
  switch (s.simulation.input.kind) {
    case SignalKind::Zero:
      in["kind"] = "zero";
      break;
    case SignalKind::Step:
      in = {{"kind", "step"},
            {"amplitude", s.simulation.input.amplitude},
            {"start", s.simulation.input.start},
            {"bus", s.simulation.input.bus}};
      break;
    case SignalKind::Sinusoid:
      in = {{"kind", "sinusoid"},
            {"amplitude", s.simulation.input.amplitude},
            {"frequency", s.simulation.input.frequency},
            {"start", s.simulation.input.start},
            {"bus", s.simulation.input.bus}};
      break;
  }
  sim["input"] = std::move(in);
  if (s.simulation.resonance) {
    json res;
    res["bus"] = s.simulation.resonance->bus;
    res["amplitude"] = s.simulation.resonance->amplitude;
    if (s.simulation.resonance->frequency) res["frequency"] = *s.simulation.resonance->frequency;
    sim["resonance"] = std::move(res);
  }
  doc["simulation"] = std::move(sim);
  return doc;
}

namespace {

constexpr double kPaperReactance = 1.0 / 15.0;  // matches the published spectra exactly

Scenario paper_base(const std::string& name) {
  Scenario s;
  s.name = name;
  for (const std::string id : {"1", "2", "3"}) {
    Bus b;
    b.id = id;
    b.kind = BusKind::Generator;
    b.generator = GeneratorParams{};  // M = 3.2, undamped, slow governor
    s.buses.push_back(std::move(b));
  }
  s.lines.push_back({"1", "2", kPaperReactance});
  s.lines.push_back({"2", "3", kPaperReactance});
  s.areas["1"] = {"1", "2"};
  s.areas["2"] = {"3"};
  s.simulation.initial.kick = KickKind::AreaAntisymmetric;
  s.simulation.initial.magnitude = 0.01;
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"paper-case1", "paper-case2", "paper-case3", "paper-inertia2", "paper-renewable"};
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "paper-case1") {
    return paper_base(name);
  }
  if (name == "paper-case2") {
    Scenario s = paper_base(name);
    s.lines[1].reactance = 10.0 * kPaperReactance;
    return s;
  }
  if (name == "paper-case3") {
    Scenario s = paper_base(name);
    s.lines.pop_back();  // tie removed entirely
    return s;
  }
  if (name == "paper-inertia2") {
    Scenario s = paper_base(name);
    s.buses[2].generator->inertia = 32.0;
    return s;
  }
  if (name == "paper-renewable") {
    Scenario s = paper_base(name);
    ResonanceSpec res;
    res.bus = "1";  // renewable in place of the bus-1 load
    res.amplitude = 0.05;
    s.simulation.resonance = std::move(res);
    return s;
  }
  throw Error(ErrorKind::ValidationError, "unknown builtin scenario '" + name + "'");
}

BuiltScenario build_scenario(const Scenario& scenario) {
  BuiltScenario built;
  built.network = build_network(scenario.buses, scenario.lines, scenario.areas);
  built.op = OperatingPoint::flat(built.network.size());
  for (const auto& [bus, angle] : scenario.angle_override) {
    built.op.angle[built.network.bus_index(bus)] = angle;
  }
  for (const auto& [bus, voltage] : scenario.voltage_override) {
    built.op.voltage[built.network.bus_index(bus)] = voltage;
  }
  built.reduced = reduce(jacobian(built.network, built.op), built.network);
  built.model = scenario.form == ModelForm::Reduced
                    ? assemble_reduced(built.network, built.reduced)
                    : assemble_full(built.network, built.reduced);
  return built;
}

namespace {

std::string first_generator_of_area(const NetworkModel& net, const std::string& area) {
  for (const Bus& b : net.buses) {
    if (b.area == area && b.kind == BusKind::Generator) return b.id;
  }
  throw Error(ErrorKind::ValidationError, "area '" + area + "' has no generator to perturb");
}

}  // namespace

Vector initial_state(const Scenario& scenario, const BuiltScenario& built) {
  const StateSpaceModel& model = built.model;
  Vector x0 = Vector::Zero(model.size());
  const InitialCondition& init = scenario.simulation.initial;

  switch (init.kick) {
    case KickKind::None: {
      for (const auto& [label, value] : init.values) {
        bool found = false;
        for (Index i = 0; i < model.size(); ++i) {
          if (model.states[static_cast<std::size_t>(i)].str() == label) {
            x0[i] = value;
            found = true;
            break;
          }
        }
        if (!found) {
          throw Error(ErrorKind::ValidationError,
                      "simulation.initial: no state labeled '" + label + "'");
        }
      }
      return x0;
    }
    case KickKind::FirstGenerator: {
      const std::vector<std::string> areas = built.network.area_ids();
      const std::string gen = first_generator_of_area(built.network, areas.front());
      x0[model.state_index({gen, StateVar::OmegaG})] = init.magnitude;
      return x0;
    }
    case KickKind::AreaAntisymmetric: {
      const std::vector<std::string> areas = built.network.area_ids();
      const std::string g1 = first_generator_of_area(built.network, areas.front());
      x0[model.state_index({g1, StateVar::OmegaG})] = init.magnitude;
      if (areas.size() >= 2) {
        const std::string g2 = first_generator_of_area(built.network, areas[1]);
        x0[model.state_index({g2, StateVar::OmegaG})] = -init.magnitude;
      }
      return x0;
    }
  }
  return x0;
}

}  // namespace iaosim

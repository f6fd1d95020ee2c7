#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iaosim/commands.hpp"
#include "iaosim/error.hpp"
#include "iaosim/results.hpp"
#include "iaosim/scenario.hpp"

namespace {

using namespace iaosim;

struct Options {
  std::string scenario;
  std::string out_dir = "out";
  std::string format = "csv";
  double step = 0.0;
  double horizon = 0.0;
  double zero_tol = 0.0;
  double threshold = 0.0;
  std::string param;
  std::string values;
  bool allow_large_step = false;
};

EmitFormat parse_format(const std::string& name) {
  if (name == "csv") return EmitFormat::Csv;
  if (name == "json") return EmitFormat::Json;
  if (name == "svg") return EmitFormat::Svg;
  throw Error(ErrorKind::ValidationError, "unknown format '" + name + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  for (const std::string& part : split(text, ',')) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(part, &pos));
      if (pos != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ValidationError, "--values entry '" + part + "' is not a number");
    }
  }
  if (values.empty()) {
    throw Error(ErrorKind::ValidationError, "--values must list at least one number");
  }
  return values;
}

Scenario load_with_overrides(const std::string& source, const Options& opt) {
  Scenario s = load_scenario(source);
  if (opt.step > 0.0) s.simulation.step = opt.step;
  if (opt.horizon > 0.0) s.simulation.horizon = opt.horizon;
  if (opt.zero_tol > 0.0) s.analysis.zero_tol = opt.zero_tol;
  if (opt.threshold > 0.0) s.analysis.participation_threshold = opt.threshold;
  return s;
}

void print_tables(const ResultBundle& bundle, std::size_t max_rows = 12) {
  for (const Table& t : bundle.tables) {
    if (t.rows.size() > max_rows) continue;  // long series go to files only
    std::cout << "[" << t.name << "]\n";
    std::cout << render_csv(t);
  }
}

void report_written(const std::vector<std::string>& paths) {
  for (const std::string& p : paths) std::cout << "wrote " << p << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Inter-area oscillation analysis for multi-area power networks"};
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
    if (needs_scenario) {
      cmd->add_option("--scenario", opt.scenario, "builtin name or scenario JSON path")
          ->required();
    }
    cmd->add_option("--out", opt.out_dir, "output directory (default: out)");
    cmd->add_option("--format", opt.format, "csv | json | svg (default: csv)");
    cmd->add_option("--zero-tol", opt.zero_tol, "zero-mode tolerance relative to ||A||");
    cmd->add_option("--threshold", opt.threshold, "participation threshold for dominant states");
  };

  CLI::App* eig = app.add_subcommand("eig", "spectrum, classification, participation");
  add_common(eig);

  CLI::App* part = app.add_subcommand("participation", "participation factors and dominant states");
  add_common(part);

  CLI::App* compare =
      app.add_subcommand("modes-compare", "identify interconnection modes against the DIS variant");
  add_common(compare);

  CLI::App* sim = app.add_subcommand("simulate", "time-domain run with interaction variables");
  add_common(sim);
  sim->add_option("--step", opt.step, "integration step (s)");
  sim->add_option("--horizon", opt.horizon, "simulation horizon (s)");
  sim->add_flag("--allow-large-step", opt.allow_large_step,
                "accept a step above the 0.01/f_max guard");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "interconnection mode across parameter values");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--param", opt.param, "lines.<from>-<to>.X or generators.<bus>.M")
      ->required();
  sweep_cmd->add_option("--values", opt.values, "comma-separated parameter values")->required();

  CLI::App* list = app.add_subcommand("list-scenarios", "list builtin scenarios");
  (void)list;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (list->parsed()) {
      for (const std::string& name : builtin_scenario_names()) std::cout << name << "\n";
      return 0;
    }

    const EmitFormat format = parse_format(opt.format);

    if (sim->parsed()) {
      // comma-separated scenario lists overlay their inter-area series in one
      // plot (tie-line strength comparison figures)
      const std::vector<std::string> sources = split(opt.scenario, ',');
      ResultBundle merged;
      for (const std::string& source : sources) {
        const Scenario s = load_with_overrides(source, opt);
        if (opt.allow_large_step && s.simulation.step && !s.simulation.resonance) {
          const double guard = default_step(build_scenario(s).model);
          if (*s.simulation.step > guard) {
            std::cerr << "warning: step " << format_number(*s.simulation.step)
                      << " s exceeds the accuracy guard " << format_number(guard) << " s\n";
          }
        }
        ResultBundle bundle = cmd_simulate(s, opt.allow_large_step);
        const std::string prefix = sources.size() > 1 ? s.name + "_" : std::string{};
        for (Table& t : bundle.tables) {
          t.name = prefix + t.name;
          merged.tables.push_back(std::move(t));
        }
        for (Curve& c : bundle.curves) merged.curves.push_back(std::move(c));
        merged.plot_title = bundle.plot_title;
        merged.plot_xlabel = bundle.plot_xlabel;
        merged.plot_ylabel = bundle.plot_ylabel;
      }
      if (sources.size() > 1) merged.plot_title = "Inter-area variable rate by scenario";
      print_tables(merged);
      report_written(emit(merged, format, opt.out_dir));
      return 0;
    }

    const Scenario scenario = load_with_overrides(opt.scenario, opt);
    ResultBundle bundle;
    if (eig->parsed()) {
      bundle = cmd_eig(scenario);
    } else if (part->parsed()) {
      bundle = cmd_participation(scenario);
    } else if (compare->parsed()) {
      bundle = cmd_modes_compare(scenario);
    } else if (sweep_cmd->parsed()) {
      bundle = cmd_sweep(scenario, opt.param, parse_values(opt.values));
    }
    print_tables(bundle);
    report_written(emit(bundle, format, opt.out_dir));
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }

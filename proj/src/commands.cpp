#include "iaosim/commands.hpp"

#include <algorithm>
#include <sstream>

#include "iaosim/error.hpp"
#include "iaosim/modal.hpp"
#include "iaosim/timesim.hpp"

namespace iaosim {

namespace {

std::string class_name(const ModeClassification& cls, Index mode) {
  for (Index z : cls.zero_modes) {
    if (z == mode) return "zero";
  }
  for (const OscillatoryPair& p : cls.oscillatory) {
    if (p.index_pos == mode || p.index_neg == mode) {
      if (p.undamped) return "oscillatory-undamped";
      return p.damped ? "oscillatory-damped" : "oscillatory-growing";
    }
  }
  return "aperiodic";
}

std::string join_labels(const std::vector<std::pair<StateLabel, double>>& labels) {
  std::ostringstream out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out << ';';
    out << labels[i].first.str();
  }
  return out.str();
}

Table modes_table(const ModeSet& modes, const ModeClassification& cls,
                  const ParticipationMatrix& pm, double threshold) {
  Table t;
  t.name = "modes";
  t.columns = {"re_per_s", "im_per_s", "class", "dominant_states"};
  t.numeric = {true, true, false, false};
  for (Index i = 0; i < modes.size(); ++i) {
    const Complex lam = modes.eigenvalues[i];
    std::string dominant;
    if (pm.valid[static_cast<std::size_t>(i)]) {
      dominant = join_labels(dominant_states(pm, i, threshold));
    }
    t.add_row({format_number(lam.real()), format_number(lam.imag()), class_name(cls, i),
               std::move(dominant)});
  }
  return t;
}

Table participation_table(const ModeSet& modes, const ParticipationMatrix& pm) {
  Table t;
  t.name = "participation";
  t.columns = {"re_per_s", "im_per_s", "state", "participation"};
  t.numeric = {true, true, false, true};
  for (Index i = 0; i < modes.size(); ++i) {
    if (!pm.valid[static_cast<std::size_t>(i)]) continue;
    for (Index k = 0; k < pm.p.rows(); ++k) {
      t.add_row({format_number(modes.eigenvalues[i].real()),
                 format_number(modes.eigenvalues[i].imag()),
                 pm.states[static_cast<std::size_t>(k)].str(), format_number(pm.p(k, i))});
    }
  }
  return t;
}

Table area_series_table(const AreaSeries& series) {
  Table t;
  t.name = "areas";
  t.columns = {"t_s"};
  t.numeric = {true};
  for (const std::string& a : series.area_ids) {
    t.columns.push_back("intvar_" + a + "_pu");
    t.numeric.push_back(true);
  }
  for (const std::string& a : series.area_ids) {
    t.columns.push_back("rate_" + a + "_pu_per_s");
    t.numeric.push_back(true);
  }
  t.columns.push_back("inter_area_pu_per_s");
  t.numeric.push_back(true);
  for (Index r = 0; r < series.time.size(); ++r) {
    std::vector<std::string> row;
    row.push_back(format_number(series.time[r]));
    for (Index a = 0; a < series.intvar.cols(); ++a) {
      row.push_back(format_number(series.intvar(r, a)));
    }
    for (Index a = 0; a < series.rate.cols(); ++a) {
      row.push_back(format_number(series.rate(r, a)));
    }
    row.push_back(format_number(series.inter_area[r]));
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace

ResultBundle cmd_eig(const Scenario& scenario) {
  const BuiltScenario built = build_scenario(scenario);
  const ModeSet modes = eigen_decompose(built.model.A, built.model.states);
  const ModeClassification cls = classify_modes(modes, scenario.analysis.zero_tol);
  const ParticipationMatrix pm = participation_factors(modes);

  ResultBundle bundle;
  bundle.tables.push_back(
      modes_table(modes, cls, pm, scenario.analysis.participation_threshold));
  bundle.tables.push_back(participation_table(modes, pm));
  return bundle;
}

ResultBundle cmd_participation(const Scenario& scenario) {
  const BuiltScenario built = build_scenario(scenario);
  const ModeSet modes = eigen_decompose(built.model.A, built.model.states);
  const ModeClassification cls = classify_modes(modes, scenario.analysis.zero_tol);
  const ParticipationMatrix pm = participation_factors(modes);

  ResultBundle bundle;
  bundle.tables.push_back(participation_table(modes, pm));

  Table dom;
  dom.name = "dominant";
  dom.columns = {"freq_rad_per_s", "state", "participation"};
  dom.numeric = {true, false, true};
  for (const OscillatoryPair& p : cls.oscillatory) {
    if (!pm.valid[static_cast<std::size_t>(p.index_pos)]) continue;
    for (const auto& [label, value] :
         dominant_states(pm, p.index_pos, scenario.analysis.participation_threshold)) {
      dom.add_row({format_number(p.frequency), label.str(), format_number(value)});
    }
  }
  bundle.tables.push_back(std::move(dom));
  return bundle;
}

ResultBundle cmd_modes_compare(const Scenario& scenario) {
  const BuiltScenario built = build_scenario(scenario);
  const NetworkModel dis_net = disconnect_ties(built.network);
  const ReducedNetwork dis_red = reduce(jacobian(dis_net, built.op), dis_net);
  const StateSpaceModel dis_model = scenario.form == ModelForm::Reduced
                                        ? assemble_reduced(dis_net, dis_red)
                                        : assemble_full(dis_net, dis_red);

  const ModeSet cis = eigen_decompose(built.model.A, built.model.states);
  const ModeSet dis = eigen_decompose(dis_model.A, dis_model.states);
  const ModeMatch match = identify_interconnection_mode(cis, dis, scenario.analysis.zero_tol);
  const ParticipationMatrix pm = participation_factors(cis);

  const auto dominant_for = [&](Complex lambda) -> std::string {
    for (Index i = 0; i < cis.size(); ++i) {
      if (std::abs(cis.eigenvalues[i] - lambda) < 1e-12 &&
          pm.valid[static_cast<std::size_t>(i)]) {
        return join_labels(dominant_states(pm, i, scenario.analysis.participation_threshold));
      }
    }
    return {};
  };

  ResultBundle bundle;
  Table t;
  t.name = "mode_match";
  t.columns = {"kind", "cis_re_per_s", "cis_im_per_s", "dis_re_per_s", "dis_im_per_s",
               "distance_per_s", "dominant_states"};
  t.numeric = {false, true, true, true, true, true, false};
  for (Complex lam : match.interconnection) {
    t.add_row({"interconnection", format_number(lam.real()), format_number(lam.imag()), "", "",
               "", dominant_for(lam)});
  }
  for (const ModeMatch::Pairing& p : match.matched) {
    t.add_row({"matched", format_number(p.cis.real()), format_number(p.cis.imag()),
               format_number(p.dis.real()), format_number(p.dis.imag()),
               format_number(p.distance), dominant_for(p.cis)});
  }
  for (Complex lam : match.unmatched_dis) {
    t.add_row({"unmatched-dis", "", "", format_number(lam.real()), format_number(lam.imag()),
               "", ""});
  }
  bundle.tables.push_back(std::move(t));

  Table summary;
  summary.name = "mode_match_summary";
  summary.columns = {"quantity", "value"};
  summary.numeric = {false, true};
  summary.add_row({"cis_zero_modes", format_number(match.cis_zero_count)});
  summary.add_row({"dis_zero_modes", format_number(match.dis_zero_count)});
  summary.add_row(
      {"interconnection_modes", format_number(static_cast<double>(match.interconnection.size()))});
  if (!match.interconnection.empty()) {
    summary.add_row(
        {"interconnection_freq_rad_per_s", format_number(match.interconnection.front().imag())});
  }
  bundle.tables.push_back(std::move(summary));
  return bundle;
}

namespace {

ResultBundle simulate_resonance(const Scenario& scenario, const BuiltScenario& built) {
  const ResonanceSpec& spec = *scenario.simulation.resonance;
  double freq;
  if (spec.frequency) {
    freq = *spec.frequency;
  } else {
    const NetworkModel dis_net = disconnect_ties(built.network);
    const ReducedNetwork dis_red = reduce(jacobian(dis_net, built.op), dis_net);
    const StateSpaceModel dis_model = assemble_reduced(dis_net, dis_red);
    const ReducedNetwork cis_red = reduce(jacobian(built.network, built.op), built.network);
    const StateSpaceModel cis_model = assemble_reduced(built.network, cis_red);
    const ModeMatch match = identify_interconnection_mode(
        eigen_decompose(cis_model.A, cis_model.states),
        eigen_decompose(dis_model.A, dis_model.states), scenario.analysis.zero_tol);
    if (match.interconnection.empty()) {
      throw Error(ErrorKind::ValidationError,
                  "scenario has no interconnection mode to resonate with");
    }
    freq = match.interconnection.front().imag();
  }

  const double step = scenario.simulation.step ? *scenario.simulation.step : 0.0;
  const ResonanceResult res =
      resonance_experiment(built.model, built.network, freq, spec.amplitude, spec.bus,
                           scenario.simulation.horizon, step);

  ResultBundle bundle;
  Table summary;
  summary.name = "resonance_summary";
  summary.columns = {"run", "forcing_rad_per_s", "first_decile_peak_pu_per_s",
                     "last_decile_peak_pu_per_s", "growth_ratio"};
  summary.numeric = {false, true, true, true, true};
  const auto decile = [](const Vector& s, bool last) {
    const Index n = s.size();
    const Index d = std::max<Index>(1, n / 10);
    double peak = 0.0;
    for (Index i = last ? n - d : 0, e = (last ? n : d); i < e; ++i) {
      peak = std::max(peak, std::abs(s[i]));
    }
    return peak;
  };
  summary.add_row({"resonant", format_number(res.forcing_frequency),
                   format_number(decile(res.resonant_series.inter_area, false)),
                   format_number(decile(res.resonant_series.inter_area, true)),
                   format_number(res.resonant_growth)});
  summary.add_row({"control", format_number(0.5 * res.forcing_frequency),
                   format_number(decile(res.off_resonant_series.inter_area, false)),
                   format_number(decile(res.off_resonant_series.inter_area, true)),
                   format_number(res.off_resonant_growth)});
  bundle.tables.push_back(std::move(summary));

  Table series;
  series.name = "resonance_series";
  series.columns = {"t_s", "inter_area_resonant_pu_per_s", "inter_area_control_pu_per_s"};
  series.numeric = {true, true, true};
  for (Index r = 0; r < res.resonant_series.time.size(); ++r) {
    series.add_row({format_number(res.resonant_series.time[r]),
                    format_number(res.resonant_series.inter_area[r]),
                    format_number(res.off_resonant_series.inter_area[r])});
  }
  bundle.tables.push_back(std::move(series));

  Curve on, off;
  on.label = "forced at interconnection mode";
  off.label = "forced at half the mode frequency";
  for (Index r = 0; r < res.resonant_series.time.size(); ++r) {
    on.x.push_back(res.resonant_series.time[r]);
    on.y.push_back(res.resonant_series.inter_area[r]);
    off.x.push_back(res.off_resonant_series.time[r]);
    off.y.push_back(res.off_resonant_series.inter_area[r]);
  }
  bundle.curves.push_back(std::move(on));
  bundle.curves.push_back(std::move(off));
  bundle.plot_title = "Inter-area response to a sinusoidal load disturbance";
  bundle.plot_xlabel = "t (s)";
  bundle.plot_ylabel = "inter-area variable rate (p.u./s)";
  return bundle;
}

}  // namespace

ResultBundle cmd_simulate(const Scenario& scenario, bool allow_large_step) {
  const BuiltScenario built = build_scenario(scenario);
  if (scenario.simulation.resonance) {
    return simulate_resonance(scenario, built);
  }

  const double step =
      scenario.simulation.step ? *scenario.simulation.step : default_step(built.model);
  const Vector x0 = initial_state(scenario, built);
  const Trajectory traj = simulate(built.model, x0, scenario.simulation.input, step,
                                   scenario.simulation.horizon, allow_large_step);
  const AreaSeries series = interaction_variables(traj, built.network);

  ResultBundle bundle;
  Table t;
  t.name = "trajectory";
  t.columns = {"t_s"};
  t.numeric = {true};
  for (const StateLabel& label : built.model.states) {
    t.columns.push_back(label.str());
    t.numeric.push_back(true);
  }
  for (Index r = 0; r < traj.time.size(); ++r) {
    std::vector<std::string> row;
    row.push_back(format_number(traj.time[r]));
    for (Index c = 0; c < traj.states.cols(); ++c) {
      row.push_back(format_number(traj.states(r, c)));
    }
    t.add_row(std::move(row));
  }
  bundle.tables.push_back(std::move(t));
  bundle.tables.push_back(area_series_table(series));

  Table summary;
  summary.name = "series_summary";
  summary.columns = {"quantity", "value"};
  summary.numeric = {false, true};
  summary.add_row({"inter_area_zero_crossing_rad_per_s",
                   format_number(zero_crossing_frequency(series.inter_area, step))});
  summary.add_row({"step_s", format_number(step)});
  bundle.tables.push_back(std::move(summary));

  Curve curve;
  curve.label = "inter-area (" + (scenario.name.empty() ? std::string("scenario") : scenario.name) + ")";
  for (Index r = 0; r < series.time.size(); ++r) {
    curve.x.push_back(series.time[r]);
    curve.y.push_back(series.inter_area[r]);
  }
  bundle.curves.push_back(std::move(curve));
  bundle.plot_title = "Inter-area variable rate";
  bundle.plot_xlabel = "t (s)";
  bundle.plot_ylabel = "rate difference (p.u./s)";
  return bundle;
}

ResultBundle cmd_sweep(const Scenario& scenario, const std::string& parameter_path,
                       const std::vector<double>& values) {
  const BuiltScenario built = build_scenario(scenario);
  const std::vector<SweepRow> rows =
      sweep(built.network, parameter_path, values, scenario.analysis.zero_tol, built.op);

  ResultBundle bundle;
  Table t;
  t.name = "sweep";
  t.columns = {"value", "interconnection_freq_rad_per_s", "interconnection_modes",
               "cis_zero_modes", "dis_zero_modes"};
  t.numeric = {true, true, true, true, true};
  Curve curve;
  curve.label = parameter_path;
  for (const SweepRow& row : rows) {
    const bool has = !row.interconnection_freqs.empty();
    t.add_row({format_number(row.value),
               has ? format_number(row.interconnection_freqs.front()) : "",
               format_number(static_cast<double>(row.interconnection_freqs.size())),
               format_number(row.cis_zero_count), format_number(row.dis_zero_count)});
    if (has) {
      curve.x.push_back(row.value);
      curve.y.push_back(row.interconnection_freqs.front());
    }
  }
  bundle.tables.push_back(std::move(t));
  if (!curve.x.empty()) bundle.curves.push_back(std::move(curve));
  bundle.plot_title = "Interconnection-mode frequency sweep";
  bundle.plot_xlabel = parameter_path;
  bundle.plot_ylabel = "frequency (rad/s)";
  return bundle;
}

}  // namespace iaosim

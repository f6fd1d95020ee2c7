#include "iaosim/timesim.hpp"

#include <algorithm>
#include <cmath>

#include "iaosim/error.hpp"

namespace iaosim {

double InputSignal::value(double t) const {
  switch (kind) {
    case SignalKind::Zero:
      return 0.0;
    case SignalKind::Step:
      return t >= start ? amplitude : 0.0;
    case SignalKind::Sinusoid:
      return t >= start ? amplitude * std::sin(frequency * (t - start)) : 0.0;
  }
  return 0.0;
}

double InputSignal::integral(double t) const {
  switch (kind) {
    case SignalKind::Zero:
      return 0.0;
    case SignalKind::Step:
      return t >= start ? amplitude * (t - start) : 0.0;
    case SignalKind::Sinusoid:
      return t >= start ? amplitude / frequency * (1.0 - std::cos(frequency * (t - start)))
                        : 0.0;
  }
  return 0.0;
}

namespace {

double max_frequency_hz(const Matrix& A) {
  if (A.rows() == 0) return 0.0;
  const ModeSet modes = eigen_decompose(A);
  double max_im = 0.0;
  for (Index i = 0; i < modes.size(); ++i) {
    max_im = std::max(max_im, std::abs(modes.eigenvalues[i].imag()));
  }
  return max_im / (2.0 * M_PI);
}

}  // namespace

double default_step(const StateSpaceModel& model) {
  const double f_max = max_frequency_hz(model.A);
  return f_max > 0.0 ? std::min(0.01 / f_max, 0.01) : 0.01;
}

double step_guard(const StateSpaceModel& model) {
  const double f_max = max_frequency_hz(model.A);
  return f_max > 0.0 ? 0.01 / f_max : std::numeric_limits<double>::infinity();
}

Trajectory simulate(const StateSpaceModel& model, const Vector& x0, const InputSignal& signal,
                    double step, double horizon, bool allow_large_step) {
  if (x0.size() != model.size()) {
    throw Error(ErrorKind::DimensionMismatch, "initial state does not match the model dimension");
  }
  if (!(step > 0.0) || !(horizon > 0.0)) {
    throw Error(ErrorKind::ValidationError, "step and horizon must be positive");
  }
  const double f_max = max_frequency_hz(model.A);
  if (f_max > 0.0 && step > 0.01 / f_max * (1.0 + 1e-12) && !allow_large_step) {
    throw Error(ErrorKind::StepTooLarge,
                "step " + std::to_string(step) + " s exceeds 0.01/f_max = " +
                    std::to_string(0.01 / f_max) + " s");
  }

  Vector b_col = Vector::Zero(model.size());
  if (signal.kind != SignalKind::Zero) {
    if (signal.kind == SignalKind::Sinusoid && !(signal.frequency > 0.0)) {
      throw Error(ErrorKind::ValidationError, "sinusoid input needs a positive frequency");
    }
    b_col = model.B_L.col(model.input_index(signal.bus));
  }

  // shrink the step just enough to land exactly on the horizon
  const Index steps = std::max<Index>(1, static_cast<Index>(std::ceil(horizon / step - 1e-9)));
  const double h = horizon / static_cast<double>(steps);

  Trajectory traj;
  traj.step = h;
  traj.model = model;
  traj.input = signal;
  traj.time.resize(steps + 1);
  traj.states.resize(steps + 1, model.size());

  Vector x = x0;
  traj.time[0] = 0.0;
  traj.states.row(0) = x.transpose();
  Vector k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size());
  for (Index s = 0; s < steps; ++s) {
    const double t = s * h;
    k1 = model.A * x + b_col * signal.value(t);
    k2 = model.A * (x + 0.5 * h * k1) + b_col * signal.value(t + 0.5 * h);
    k3 = model.A * (x + 0.5 * h * k2) + b_col * signal.value(t + 0.5 * h);
    k4 = model.A * (x + h * k3) + b_col * signal.value(t + h);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.time[s + 1] = (s + 1) * h;
    traj.states.row(s + 1) = x.transpose();
  }
  return traj;
}

AreaSeries interaction_variables(const Trajectory& traj, const NetworkModel& network) {
  const StateSpaceModel& model = traj.model;
  const Index n_gen = static_cast<Index>(model.generator_buses.size());
  const Index n_t = traj.time.size();

  std::vector<Index> omega_idx, pg_idx;
  for (Index i = 0; i < n_gen; ++i) {
    omega_idx.push_back(model.state_index({model.generator_buses[i], StateVar::OmegaG}));
    pg_idx.push_back(model.state_index({model.generator_buses[i], StateVar::PG}));
  }

  AreaSeries series;
  series.area_ids = network.area_ids();
  series.time = traj.time;
  const Index n_area = static_cast<Index>(series.area_ids.size());
  series.intvar = Matrix::Zero(n_t, n_area);
  series.rate = Matrix::Zero(n_t, n_area);

  // generator -> area slot
  std::vector<Index> gen_area(n_gen);
  for (Index g = 0; g < n_gen; ++g) {
    const std::string& area = network.bus(model.generator_buses[g]).area;
    const auto it = std::find(series.area_ids.begin(), series.area_ids.end(), area);
    if (it == series.area_ids.end()) {
      throw Error(ErrorKind::UnknownArea, "generator bus '" + model.generator_buses[g] +
                                              "' belongs to unknown area '" + area + "'");
    }
    gen_area[g] = static_cast<Index>(it - series.area_ids.begin());
  }

  const bool forced = traj.input.kind != SignalKind::Zero;
  Index forced_area = -1;
  Vector pg_forcing = Vector::Zero(n_gen);
  if (forced) {
    const Index col = model.input_index(traj.input.bus);
    const std::string& area = network.bus(traj.input.bus).area;
    const auto it = std::find(series.area_ids.begin(), series.area_ids.end(), area);
    if (it == series.area_ids.end()) {
      throw Error(ErrorKind::UnknownArea, "input bus '" + traj.input.bus + "' has no area");
    }
    forced_area = static_cast<Index>(it - series.area_ids.begin());
    for (Index g = 0; g < n_gen; ++g) pg_forcing[g] = model.B_L(pg_idx[g], col);
  }

  for (Index t = 0; t < n_t; ++t) {
    Vector omega(n_gen), pg(n_gen);
    for (Index g = 0; g < n_gen; ++g) {
      omega[g] = traj.states(t, omega_idx[g]);
      pg[g] = traj.states(t, pg_idx[g]);
    }
    const Vector pg_rate = model.K_P * omega;
    const double u = forced ? traj.input.value(traj.time[t]) : 0.0;
    const double load_dev = forced ? traj.input.integral(traj.time[t]) : 0.0;

    for (Index g = 0; g < n_gen; ++g) {
      const Index a = gen_area[g];
      // net module power of a generator-load pair is P_G - P_L
      series.intvar(t, a) += pg[g];
      series.rate(t, a) += pg_rate[g] + (forced ? pg_forcing[g] * u : 0.0);
    }
    if (forced) {
      series.intvar(t, forced_area) -= load_dev;
      series.rate(t, forced_area) -= u;
    }
  }

  series.inter_area = Vector::Zero(n_t);
  if (n_area >= 2) {
    series.inter_area = series.rate.col(0) - series.rate.col(1);
  }
  return series;
}

namespace {

double decile_peak(const Vector& series, bool last) {
  const Index n = series.size();
  const Index d = std::max<Index>(1, n / 10);
  const Index begin = last ? n - d : 0;
  double peak = 0.0;
  for (Index i = begin; i < begin + d; ++i) peak = std::max(peak, std::abs(series[i]));
  return peak;
}

}  // namespace

ResonanceResult resonance_experiment(const StateSpaceModel& model, const NetworkModel& network,
                                     double mode_freq, double amplitude, const std::string& bus,
                                     double horizon, double step) {
  if (!(amplitude >= 0.0)) {
    throw Error(ErrorKind::ValidationError, "amplitude must be non-negative");
  }
  if (!(mode_freq > 0.0)) {
    throw Error(ErrorKind::ValidationError, "resonance frequency must be positive");
  }
  if (!(step > 0.0)) step = default_step(model);

  ResonanceResult result;
  result.forcing_frequency = mode_freq;
  const Vector x0 = Vector::Zero(model.size());

  InputSignal forcing;
  forcing.kind = SignalKind::Sinusoid;
  forcing.amplitude = amplitude;
  forcing.frequency = mode_freq;
  forcing.bus = bus;
  result.resonant = simulate(model, x0, forcing, step, horizon);
  result.resonant_series = interaction_variables(result.resonant, network);

  forcing.frequency = 0.5 * mode_freq;
  result.off_resonant = simulate(model, x0, forcing, step, horizon);
  result.off_resonant_series = interaction_variables(result.off_resonant, network);

  const auto ratio = [](const Vector& s) {
    const double first = decile_peak(s, false);
    const double last = decile_peak(s, true);
    return first > 0.0 ? last / first : 0.0;
  };
  result.resonant_growth = ratio(result.resonant_series.inter_area);
  result.off_resonant_growth = ratio(result.off_resonant_series.inter_area);
  return result;
}

namespace {

struct ParamPath {
  enum class Kind { LineReactance, GeneratorInertia } kind;
  std::string a, b;  // line endpoints, or bus in `a`
};

ParamPath parse_path(const std::string& path) {
  const auto fail = [&]() -> ParamPath {
    throw Error(ErrorKind::UnknownParameterPath,
                "unknown parameter path '" + path +
                    "' (expected lines.<from>-<to>.X or generators.<bus>.M)");
  };
  const auto dot1 = path.find('.');
  const auto dot2 = path.rfind('.');
  if (dot1 == std::string::npos || dot2 == dot1) return fail();
  const std::string head = path.substr(0, dot1);
  const std::string mid = path.substr(dot1 + 1, dot2 - dot1 - 1);
  const std::string leaf = path.substr(dot2 + 1);
  if (head == "lines" && leaf == "X") {
    const auto dash = mid.find('-');
    if (dash == std::string::npos) return fail();
    return {ParamPath::Kind::LineReactance, mid.substr(0, dash), mid.substr(dash + 1)};
  }
  if (head == "generators" && leaf == "M") {
    return {ParamPath::Kind::GeneratorInertia, mid, {}};
  }
  return fail();
}

NetworkModel with_parameter(const NetworkModel& base, const ParamPath& path, double value) {
  NetworkModel net = base;
  if (path.kind == ParamPath::Kind::LineReactance) {
    bool found = false;
    for (Line& l : net.lines) {
      if ((l.from == path.a && l.to == path.b) || (l.from == path.b && l.to == path.a)) {
        l.reactance = value;
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorKind::UnknownParameterPath,
                  "no line between '" + path.a + "' and '" + path.b + "'");
    }
  } else {
    Bus* bus = nullptr;
    for (Bus& b : net.buses) {
      if (b.id == path.a) bus = &b;
    }
    if (!bus || !bus->generator) {
      throw Error(ErrorKind::UnknownParameterPath,
                  "bus '" + path.a + "' does not carry a generator");
    }
    bus->generator->inertia = value;
  }
  return build_network(net.buses, net.lines, net.areas);
}

}  // namespace

std::vector<SweepRow> sweep(const NetworkModel& network, const std::string& parameter_path,
                            const std::vector<double>& values, double zero_tol,
                            std::optional<OperatingPoint> op) {
  const ParamPath path = parse_path(parameter_path);
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double value : values) {
    const NetworkModel cis_net = with_parameter(network, path, value);
    const NetworkModel dis_net = disconnect_ties(cis_net);
    const OperatingPoint point = op ? *op : OperatingPoint::flat(cis_net.size());

    const StateSpaceModel cis = assemble_reduced(cis_net, reduce(jacobian(cis_net, point), cis_net));
    const StateSpaceModel dis = assemble_reduced(dis_net, reduce(jacobian(dis_net, point), dis_net));
    const ModeMatch match = identify_interconnection_mode(
        eigen_decompose(cis.A, cis.states), eigen_decompose(dis.A, dis.states), zero_tol);

    SweepRow row;
    row.value = value;
    for (Complex lam : match.interconnection) row.interconnection_freqs.push_back(lam.imag());
    std::sort(row.interconnection_freqs.begin(), row.interconnection_freqs.end());
    row.cis_zero_count = match.cis_zero_count;
    row.dis_zero_count = match.dis_zero_count;
    rows.push_back(std::move(row));
  }
  return rows;
}

double zero_crossing_frequency(const Vector& series, double step) {
  std::vector<double> crossings;
  for (Index i = 0; i + 1 < series.size(); ++i) {
    const double a = series[i];
    const double b = series[i + 1];
    if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      crossings.push_back(i * step + step * std::abs(a) / (std::abs(a) + std::abs(b)));
    }
  }
  if (crossings.size() < 2) return 0.0;
  const double mean_half_period = (crossings.back() - crossings.front()) /
                                  static_cast<double>(crossings.size() - 1);
  return M_PI / mean_half_period;
}

}  // namespace iaosim

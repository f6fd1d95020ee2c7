#include "iaosim/statespace.hpp"

#include <algorithm>

#include "iaosim/error.hpp"

namespace iaosim {

std::string StateLabel::str() const {
  switch (var) {
    case StateVar::OmegaG: return "omega_G_" + generator;
    case StateVar::Pt: return "P_t_" + generator;
    case StateVar::Valve: return "a_" + generator;
    case StateVar::PG: return "P_G_" + generator;
  }
  return {};
}

Index StateSpaceModel::state_index(const StateLabel& label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return static_cast<Index>(i);
  }
  throw Error(ErrorKind::ValidationError, "no state labeled '" + label.str() + "'");
}

Index StateSpaceModel::input_index(const std::string& bus) const {
  for (std::size_t i = 0; i < input_buses.size(); ++i) {
    if (input_buses[i] == bus) return static_cast<Index>(i);
  }
  throw Error(ErrorKind::UnknownBus, "no disturbance input for bus '" + bus + "'");
}

std::vector<Index> StateSpaceModel::indices_of(StateVar var) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].var == var) out.push_back(static_cast<Index>(i));
  }
  return out;
}

GtgBlock gtg_block(const GeneratorParams& p) {
  GtgBlock b;
  b.A_LC << -p.damping / p.inertia, 1.0 / p.inertia, 0.0,
      0.0, -1.0 / p.turbine_time_constant, p.turbine_gain / p.turbine_time_constant,
      -1.0 / p.governor_time_constant, 0.0, -1.0 / (p.droop * p.governor_time_constant);
  b.c_M << -1.0 / p.inertia, 0.0, 0.0;
  return b;
}

Matrix omega_selector(Index n_generators) {
  Matrix E = Matrix::Zero(n_generators, 3 * n_generators);
  for (Index i = 0; i < n_generators; ++i) E(i, 3 * i) = 1.0;
  return E;
}

namespace {

// Disturbance columns over the P_G rows: +e_i for the load colocated at
// generator bus i (the pair's net power balance is P_G - P_L), -D_P column
// for a load-only bus.
Matrix power_rate_inputs(const NetworkModel& network, const ReducedNetwork& reduced) {
  const Index n = static_cast<Index>(reduced.generator_buses.size());
  const Index n_buses = network.size();
  Matrix B = Matrix::Zero(n, n_buses);
  for (Index i = 0; i < n; ++i) {
    B(i, network.bus_index(reduced.generator_buses[i])) = 1.0;
  }
  for (std::size_t l = 0; l < reduced.load_buses.size(); ++l) {
    B.col(network.bus_index(reduced.load_buses[l])) = -reduced.D_P.col(static_cast<Index>(l));
  }
  return B;
}

std::vector<std::string> bus_ids(const NetworkModel& network) {
  std::vector<std::string> ids;
  ids.reserve(network.buses.size());
  for (const Bus& b : network.buses) ids.push_back(b.id);
  return ids;
}

const GeneratorParams& params_at(const NetworkModel& network, const std::string& bus) {
  const Bus& b = network.bus(bus);
  if (!b.generator) {
    throw Error(ErrorKind::ValidationError, "bus '" + bus + "' has no generator");
  }
  return *b.generator;
}

}  // namespace

StateSpaceModel assemble_full(const NetworkModel& network, const ReducedNetwork& reduced) {
  const Index n = static_cast<Index>(reduced.generator_buses.size());
  if (reduced.K_P.rows() != n || reduced.K_P.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "K_P does not match the generator count");
  }

  StateSpaceModel m;
  m.form = ModelForm::Full;
  m.generator_buses = reduced.generator_buses;
  m.K_P = reduced.K_P;
  m.input_buses = bus_ids(network);

  m.A = Matrix::Zero(4 * n, 4 * n);
  for (Index i = 0; i < n; ++i) {
    const GtgBlock b = gtg_block(params_at(network, reduced.generator_buses[i]));
    m.A.block<3, 3>(3 * i, 3 * i) = b.A_LC;
    m.A.block<3, 1>(3 * i, 3 * n + i) = b.c_M;
  }
  m.A.block(3 * n, 0, n, 3 * n) = reduced.K_P * omega_selector(n);

  m.B_L = Matrix::Zero(4 * n, network.size());
  m.B_L.bottomRows(n) = power_rate_inputs(network, reduced);

  for (Index i = 0; i < n; ++i) {
    const std::string& g = reduced.generator_buses[i];
    m.states.push_back({g, StateVar::OmegaG});
    m.states.push_back({g, StateVar::Pt});
    m.states.push_back({g, StateVar::Valve});
  }
  for (Index i = 0; i < n; ++i) {
    m.states.push_back({reduced.generator_buses[i], StateVar::PG});
  }
  return m;
}

StateSpaceModel assemble_reduced(const NetworkModel& network, const ReducedNetwork& reduced) {
  const Index n = static_cast<Index>(reduced.generator_buses.size());
  if (reduced.K_P.rows() != n || reduced.K_P.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "K_P does not match the generator count");
  }

  StateSpaceModel m;
  m.form = ModelForm::Reduced;
  m.generator_buses = reduced.generator_buses;
  m.K_P = reduced.K_P;
  m.input_buses = bus_ids(network);

  m.A = Matrix::Zero(2 * n, 2 * n);
  for (Index i = 0; i < n; ++i) {
    const GeneratorParams& p = params_at(network, reduced.generator_buses[i]);
    m.A(i, i) = -p.damping / p.inertia;
    m.A(i, n + i) = -1.0 / p.inertia;
  }
  m.A.block(n, 0, n, n) = reduced.K_P;

  m.B_L = Matrix::Zero(2 * n, network.size());
  m.B_L.bottomRows(n) = power_rate_inputs(network, reduced);

  for (Index i = 0; i < n; ++i) {
    m.states.push_back({reduced.generator_buses[i], StateVar::OmegaG});
  }
  for (Index i = 0; i < n; ++i) {
    m.states.push_back({reduced.generator_buses[i], StateVar::PG});
  }
  return m;
}

}  // namespace iaosim

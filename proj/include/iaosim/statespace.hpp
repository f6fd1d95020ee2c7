#pragma once

#include <string>
#include <vector>

#include "iaosim/netmodel.hpp"
#include "iaosim/types.hpp"

namespace iaosim {

enum class StateVar { OmegaG, Pt, Valve, PG };

struct StateLabel {
  std::string generator;  // bus id of the machine
  StateVar var = StateVar::OmegaG;

  std::string str() const;
  bool operator==(const StateLabel&) const = default;
};

enum class ModelForm { Full, Reduced };

/// Linear model x' = A x + B_L u(t) where u stacks the load power rates
/// dP_L/dt per bus (one input column per network bus, colocated loads
/// included).
struct StateSpaceModel {
  Matrix A;                        // 1/s
  std::vector<StateLabel> states;  // row labels of A
  Matrix B_L;                      // n_states x n_buses
  std::vector<std::string> input_buses;
  ModelForm form = ModelForm::Reduced;

  // carried along for interaction-variable evaluation
  Matrix K_P;
  std::vector<std::string> generator_buses;

  Index size() const { return A.rows(); }
  Index state_index(const StateLabel& label) const;
  Index input_index(const std::string& bus) const;
  std::vector<Index> indices_of(StateVar var) const;
};

/// Local 3x3 G-T-G block over states (omega_G, P_t, a) and the input column
/// multiplying the machine's electric power P_G.
struct GtgBlock {
  Eigen::Matrix3d A_LC;
  Eigen::Vector3d c_M;
};

GtgBlock gtg_block(const GeneratorParams& p);

/// 0/1 selector E with E x_LC = omega_G for n stacked 3-state machines.
Matrix omega_selector(Index n_generators);

/// Four states per machine: block-diagonal local dynamics coupled to the
/// power states through A = [[blkdiag A_LC, blkdiag c_M], [K_P E, 0]].
/// State order: all local states machine by machine, then all P_G.
StateSpaceModel assemble_full(const NetworkModel& network, const ReducedNetwork& reduced);

/// Two states per machine (omega_G; P_G), the large-T_t/T_g limit:
/// A = [[-M^-1 D, -M^-1], [K_P, 0]].
StateSpaceModel assemble_reduced(const NetworkModel& network, const ReducedNetwork& reduced);

}  // namespace iaosim

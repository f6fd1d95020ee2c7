#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iaosim/types.hpp"

namespace iaosim {

/// Governor-turbine-generator parameters of one machine, all in per unit
/// except the time constants (seconds).
struct GeneratorParams {
  double inertia = 3.2;                  // M, p.u.·s
  double damping = 0.0;                  // D, p.u.
  double turbine_time_constant = 1e6;    // T_t, s
  double governor_time_constant = 1e6;   // T_g, s
  double turbine_gain = 1.0;             // K_t
  double droop = 0.05;                   // r
};

enum class BusKind { Generator, LoadOnly };

/// A network node. Generator buses carry a colocated load; the pair acts as
/// one module with net power P_G - P_L.
struct Bus {
  std::string id;
  BusKind kind = BusKind::Generator;
  std::optional<GeneratorParams> generator;
  double load = 0.0;  // P_L, p.u.
  std::string area;
};

/// Lossless transmission line (series reactance only).
struct Line {
  std::string from;
  std::string to;
  double reactance = 0.0;  // X, p.u.
};

/// Phase angles (rad) and voltage magnitudes (p.u.), indexed by network bus
/// order.
struct OperatingPoint {
  Vector angle;
  Vector voltage;

  static OperatingPoint flat(Index n_buses);
};

struct NetworkModel {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  // area id -> bus ids, sorted by area id; mirrors Bus::area
  std::map<std::string, std::vector<std::string>> areas;
  // indices into `lines` whose endpoints lie in different areas
  std::vector<std::size_t> tie_lines;

  Index size() const { return static_cast<Index>(buses.size()); }
  Index bus_index(const std::string& id) const;
  const Bus& bus(const std::string& id) const { return buses[bus_index(id)]; }
  std::vector<Index> generator_indices() const;
  std::vector<Index> load_only_indices() const;
  std::vector<std::string> area_ids() const;
};

/// Validates the bus/line/area description and derives the tie-line set.
/// Throws DuplicateId, UnknownBus, ValidationError, IslandedAreaInterior.
NetworkModel build_network(std::vector<Bus> buses, std::vector<Line> lines,
                           std::map<std::string, std::vector<std::string>> areas);

/// Full bus power-angle sensitivity dP/ddelta. Off-diagonal entries are
/// -(V_i V_j / X_ij) cos(d_i - d_j); diagonals make rows sum to zero. At flat
/// start this is the susceptance-weighted graph Laplacian.
Matrix jacobian(const NetworkModel& network, const OperatingPoint& op);

struct ReducedNetwork {
  Matrix K_P;  // n x n generator power-angle sensitivity, p.u./rad
  Matrix D_P;  // n x m map from load-only bus power rates into generator rates
  std::vector<std::string> generator_buses;
  std::vector<std::string> load_buses;  // load-only
};

/// Eliminates load-only buses from J by Schur complement:
/// K_P = J_GG - J_GL J_LL^-1 J_LG,  D_P = J_GL J_LL^-1.
/// Throws SingularReduction when J_LL is not invertible.
ReducedNetwork reduce(const Matrix& J, const std::vector<Index>& generator_rows,
                      const std::vector<Index>& load_rows,
                      const std::vector<std::string>& bus_ids);

/// Convenience overload partitioning by bus kind.
ReducedNetwork reduce(const Matrix& J, const NetworkModel& network);

/// Copy of the network with every tie-line removed (the DIS variant).
NetworkModel disconnect_ties(const NetworkModel& network);

}  // namespace iaosim

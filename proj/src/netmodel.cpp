#include "iaosim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "iaosim/error.hpp"

namespace iaosim {

OperatingPoint OperatingPoint::flat(Index n_buses) {
  OperatingPoint op;
  op.angle = Vector::Zero(n_buses);
  op.voltage = Vector::Ones(n_buses);
  return op;
}

Index NetworkModel::bus_index(const std::string& id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return static_cast<Index>(i);
  }
  throw Error(ErrorKind::UnknownBus, "unknown bus id '" + id + "'");
}

std::vector<Index> NetworkModel::generator_indices() const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].kind == BusKind::Generator) out.push_back(static_cast<Index>(i));
  }
  return out;
}

std::vector<Index> NetworkModel::load_only_indices() const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].kind == BusKind::LoadOnly) out.push_back(static_cast<Index>(i));
  }
  return out;
}

std::vector<std::string> NetworkModel::area_ids() const {
  std::vector<std::string> ids;
  ids.reserve(areas.size());
  for (const auto& [id, members] : areas) ids.push_back(id);
  return ids;
}

namespace {

// Disjoint-set over bus positions.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void merge(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

NetworkModel build_network(std::vector<Bus> buses, std::vector<Line> lines,
                           std::map<std::string, std::vector<std::string>> areas) {
  if (buses.empty()) {
    throw Error(ErrorKind::ValidationError, "network needs at least one bus");
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (!index.emplace(buses[i].id, i).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate bus id '" + buses[i].id + "'");
    }
    const Bus& b = buses[i];
    if ((b.kind == BusKind::Generator) != b.generator.has_value()) {
      throw Error(ErrorKind::ValidationError,
                  "bus '" + b.id + "': generator parameters present iff kind is generator");
    }
    if (b.generator) {
      const GeneratorParams& g = *b.generator;
      if (!(g.inertia > 0) || g.damping < 0 || !(g.turbine_time_constant > 0) ||
          !(g.governor_time_constant > 0) || !(g.droop > 0)) {
        throw Error(ErrorKind::ValidationError,
                    "bus '" + b.id + "': generator parameters out of range");
      }
    }
  }

  for (const Line& l : lines) {
    if (!index.count(l.from)) {
      throw Error(ErrorKind::UnknownBus, "line references unknown bus '" + l.from + "'");
    }
    if (!index.count(l.to)) {
      throw Error(ErrorKind::UnknownBus, "line references unknown bus '" + l.to + "'");
    }
    if (l.from == l.to) {
      throw Error(ErrorKind::ValidationError, "line endpoints coincide at bus '" + l.from + "'");
    }
    if (!(l.reactance > 0)) {
      throw Error(ErrorKind::ValidationError,
                  "line " + l.from + "-" + l.to + ": reactance must be positive");
    }
  }

  // Area assignment: every bus in exactly one area.
  std::unordered_map<std::string, std::string> area_of;
  for (const auto& [area, members] : areas) {
    for (const std::string& id : members) {
      if (!index.count(id)) {
        throw Error(ErrorKind::UnknownBus, "area '" + area + "' references unknown bus '" + id + "'");
      }
      if (!area_of.emplace(id, area).second) {
        throw Error(ErrorKind::ValidationError,
                    "bus '" + id + "' assigned to more than one area");
      }
    }
  }
  for (Bus& b : buses) {
    auto it = area_of.find(b.id);
    if (it == area_of.end()) {
      throw Error(ErrorKind::ValidationError, "bus '" + b.id + "' belongs to no area");
    }
    b.area = it->second;
  }

  NetworkModel net;
  net.buses = std::move(buses);
  net.lines = std::move(lines);
  net.areas = std::move(areas);

  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    const Line& l = net.lines[k];
    if (area_of[l.from] != area_of[l.to]) net.tie_lines.push_back(k);
  }

  // Each area's interior (tie-lines excluded) must be connected; a single-bus
  // area is trivially connected.
  UnionFind uf(net.buses.size());
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    const Line& l = net.lines[k];
    if (area_of[l.from] == area_of[l.to]) {
      uf.merge(index[l.from], index[l.to]);
    }
  }
  for (const auto& [area, members] : net.areas) {
    std::set<std::size_t> roots;
    for (const std::string& id : members) roots.insert(uf.find(index[id]));
    if (roots.size() > 1) {
      throw Error(ErrorKind::IslandedAreaInterior,
                  "area '" + area + "' interior is disconnected");
    }
  }

  return net;
}

Matrix jacobian(const NetworkModel& network, const OperatingPoint& op) {
  const Index n = network.size();
  if (op.angle.size() != n || op.voltage.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "operating point does not cover every bus");
  }
  for (Index i = 0; i < n; ++i) {
    if (!(op.voltage[i] > 0)) {
      throw Error(ErrorKind::ValidationError, "operating-point voltage must be positive");
    }
  }

  Matrix J = Matrix::Zero(n, n);
  for (const Line& l : network.lines) {
    const Index i = network.bus_index(l.from);
    const Index j = network.bus_index(l.to);
    const double b = op.voltage[i] * op.voltage[j] / l.reactance *
                     std::cos(op.angle[i] - op.angle[j]);
    J(i, j) -= b;
    J(j, i) -= b;
    J(i, i) += b;
    J(j, j) += b;
  }
  return J;
}

ReducedNetwork reduce(const Matrix& J, const std::vector<Index>& generator_rows,
                      const std::vector<Index>& load_rows,
                      const std::vector<std::string>& bus_ids) {
  const Index n = static_cast<Index>(generator_rows.size());
  const Index m = static_cast<Index>(load_rows.size());

  ReducedNetwork red;
  for (Index g : generator_rows) red.generator_buses.push_back(bus_ids[g]);
  for (Index l : load_rows) red.load_buses.push_back(bus_ids[l]);

  Matrix J_GG(n, n), J_GL(n, m), J_LG(m, n), J_LL(m, m);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) J_GG(a, b) = J(generator_rows[a], generator_rows[b]);
    for (Index b = 0; b < m; ++b) J_GL(a, b) = J(generator_rows[a], load_rows[b]);
  }
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < n; ++b) J_LG(a, b) = J(load_rows[a], generator_rows[b]);
    for (Index b = 0; b < m; ++b) J_LL(a, b) = J(load_rows[a], load_rows[b]);
  }

  if (m == 0) {
    red.K_P = J_GG;
    red.D_P = Matrix::Zero(n, 0);
    return red;
  }

  Eigen::FullPivLU<Matrix> lu(J_LL.transpose());
  lu.setThreshold(1e-12);
  if (lu.rank() < m) {
    throw Error(ErrorKind::SingularReduction,
                "load-bus block of the Jacobian is singular; a load-only bus is "
                "electrically islanded");
  }
  red.D_P = lu.solve(J_GL.transpose()).transpose();  // J_GL J_LL^-1
  red.K_P = J_GG - red.D_P * J_LG;
  return red;
}

ReducedNetwork reduce(const Matrix& J, const NetworkModel& network) {
  std::vector<std::string> ids;
  ids.reserve(network.buses.size());
  for (const Bus& b : network.buses) ids.push_back(b.id);
  return reduce(J, network.generator_indices(), network.load_only_indices(), ids);
}

NetworkModel disconnect_ties(const NetworkModel& network) {
  NetworkModel dis = network;
  std::set<std::size_t> ties(network.tie_lines.begin(), network.tie_lines.end());
  dis.lines.clear();
  for (std::size_t k = 0; k < network.lines.size(); ++k) {
    if (!ties.count(k)) dis.lines.push_back(network.lines[k]);
  }
  dis.tie_lines.clear();
  return dis;
}

}  // namespace iaosim

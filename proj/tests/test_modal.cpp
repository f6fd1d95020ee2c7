#include <doctest.h>

#include <random>
#include <set>

#include "iaosim/error.hpp"
#include "iaosim/modal.hpp"
#include "oracles.hpp"

using namespace iaosim;

namespace {

Bus gen_bus(const std::string& id, double inertia = 3.2) {
  Bus b;
  b.id = id;
  b.kind = BusKind::Generator;
  GeneratorParams p;
  p.inertia = inertia;
  b.generator = p;
  return b;
}

NetworkModel three_bus(double x2, double m3 = 3.2) {
  return build_network({gen_bus("1"), gen_bus("2"), gen_bus("3", m3)},
                       {{"1", "2", 1.0 / 15.0}, {"2", "3", x2}},
                       {{"1", {"1", "2"}}, {"2", {"3"}}});
}

StateSpaceModel reduced_model(const NetworkModel& net) {
  return assemble_reduced(net, reduce(jacobian(net, OperatingPoint::flat(net.size())), net));
}

std::set<std::string> dominant_set(const ParticipationMatrix& pm, const ModeSet& modes,
                                   double freq, double threshold = 0.1) {
  for (Index i = 0; i < modes.size(); ++i) {
    if (std::abs(modes.eigenvalues[i].imag() - freq) < 1e-3) {
      std::set<std::string> out;
      for (const auto& [label, p] : dominant_states(pm, i, threshold)) out.insert(label.str());
      return out;
    }
  }
  FAIL("no mode near the requested frequency");
  return {};
}

}  // namespace

TEST_CASE("eigen_decompose of the rotation generator") {
  Matrix A(2, 2);
  A << 0, 1, -1, 0;
  const ModeSet modes = eigen_decompose(A);
  const ComplexVector lam = oracles::sorted_by_imag(modes.eigenvalues);
  CHECK(lam[0].imag() == doctest::Approx(-1.0));
  CHECK(lam[1].imag() == doctest::Approx(1.0));
  CHECK(std::abs(lam[0].real()) < 1e-12);
  CHECK(modes.biorthogonality_residual < 1e-10);
}

TEST_CASE("eigen_decompose satisfies the two-sided residual invariants") {
  const StateSpaceModel m = reduced_model(three_bus(2.0 / 3.0));  // weak-tie system
  const ModeSet modes = eigen_decompose(m.A, m.states);
  const double scale = m.A.cwiseAbs().rowwise().sum().maxCoeff();
  for (Index i = 0; i < modes.size(); ++i) {
    if (modes.defective[static_cast<std::size_t>(i)]) continue;
    const ComplexVector rres =
        m.A * modes.right.col(i) - modes.eigenvalues[i] * modes.right.col(i);
    const ComplexVector lres = (modes.left.row(i) * m.A).transpose() -
                               modes.eigenvalues[i] * modes.left.row(i).transpose();
    CHECK(rres.norm() < 1e-8 * scale * modes.right.col(i).norm());
    CHECK(lres.norm() < 1e-8 * scale * modes.left.row(i).norm());
  }
  CHECK(modes.biorthogonality_residual < 1e-8);
}

TEST_CASE("case-2 and inertia-case spectra match the published values") {
  const ModeClassification weak =
      classify_modes(eigen_decompose(reduced_model(three_bus(2.0 / 3.0)).A));
  REQUIRE(weak.oscillatory.size() == 2);
  CHECK(std::abs(weak.oscillatory[0].frequency - 0.8274) < 1e-3);
  CHECK(std::abs(weak.oscillatory[1].frequency - 3.1028) < 1e-3);

  const ModeClassification heavy =
      classify_modes(eigen_decompose(reduced_model(three_bus(1.0 / 15.0, 32.0)).A));
  REQUIRE(heavy.oscillatory.size() == 2);
  CHECK(std::abs(heavy.oscillatory[0].frequency - 1.4578) < 1e-3);
  CHECK(std::abs(heavy.oscillatory[1].frequency - 3.5221) < 1e-3);
}

TEST_CASE("classification counts zeros per connected component") {
  const ModeClassification cis = classify_modes(eigen_decompose(reduced_model(three_bus(1.0 / 15.0)).A));
  CHECK(cis.zero_modes.size() == 2);
  CHECK(cis.oscillatory.size() == 2);
  for (const OscillatoryPair& p : cis.oscillatory) CHECK(p.undamped);

  const NetworkModel dis = disconnect_ties(three_bus(1.0 / 15.0));
  const ModeClassification dcls = classify_modes(eigen_decompose(reduced_model(dis).A));
  CHECK(dcls.zero_modes.size() == 4);
  CHECK(dcls.oscillatory.size() == 1);
}

TEST_CASE("classification of the zero matrix") {
  const ModeSet modes = eigen_decompose(Matrix::Zero(4, 4));
  const ModeClassification cls = classify_modes(modes);
  CHECK(cls.zero_modes.size() == 4);
  CHECK(cls.oscillatory.empty());
}

TEST_CASE("participation of the equal-tie system splits evenly over the outer machines") {
  const StateSpaceModel m = reduced_model(three_bus(1.0 / 15.0));
  const ModeSet modes = eigen_decompose(m.A, m.states);
  const ParticipationMatrix pm = participation_factors(modes);

  // interconnection mode: quarter each on omega/P of machines 1 and 3
  const std::set<std::string> slow = dominant_set(pm, modes, 2.1650);
  CHECK(slow == std::set<std::string>{"omega_G_1", "P_G_1", "omega_G_3", "P_G_3"});
  for (Index i = 0; i < modes.size(); ++i) {
    if (std::abs(modes.eigenvalues[i].imag() - 2.1650635) < 1e-4) {
      CHECK(pm.p(m.state_index({"1", StateVar::OmegaG}), i) == doctest::Approx(0.25).epsilon(1e-3));
      CHECK(pm.p(m.state_index({"3", StateVar::PG}), i) == doctest::Approx(0.25).epsilon(1e-3));
      CHECK(pm.p(m.state_index({"2", StateVar::OmegaG}), i) < 1e-6);
    }
  }

  // local mode concentrates on machine 2
  const std::set<std::string> fast = dominant_set(pm, modes, 3.7500);
  CHECK(fast == std::set<std::string>{"omega_G_2", "P_G_2"});
}

TEST_CASE("participation columns sum to one and conjugate columns agree") {
  const StateSpaceModel m = reduced_model(three_bus(2.0 / 3.0));
  const ModeSet modes = eigen_decompose(m.A, m.states);
  const ParticipationMatrix pm = participation_factors(modes);
  for (Index i = 0; i < modes.size(); ++i) {
    if (!pm.valid[static_cast<std::size_t>(i)]) continue;
    CHECK(std::abs(pm.p.col(i).sum() - 1.0) < 1e-8);
    for (Index j = i + 1; j < modes.size(); ++j) {
      if (!pm.valid[static_cast<std::size_t>(j)]) continue;
      if (std::abs(modes.eigenvalues[j] - std::conj(modes.eigenvalues[i])) < 1e-12) {
        CHECK((pm.p.col(i) - pm.p.col(j)).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("participation of a diagonal matrix is the identity pattern") {
  Matrix A = Matrix::Zero(3, 3);
  A.diagonal() << -1.0, -2.0, -3.0;
  const ModeSet modes = eigen_decompose(A);
  const ParticipationMatrix pm = participation_factors(modes);
  for (Index i = 0; i < 3; ++i) {
    REQUIRE(pm.valid[static_cast<std::size_t>(i)]);
    Index k;
    pm.p.col(i).maxCoeff(&k);
    CHECK(pm.p(k, i) == doctest::Approx(1.0));
    CHECK(pm.p.col(i).sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("the nilpotent single-machine block is reported defective, not fatal") {
  Matrix A(2, 2);
  A << 0, -1.0 / 3.2, 0, 0;
  const ModeSet modes = eigen_decompose(A);
  REQUIRE(modes.size() == 2);
  CHECK(std::abs(modes.eigenvalues[0]) < 1e-9);
  CHECK(std::abs(modes.eigenvalues[1]) < 1e-9);
  CHECK(modes.defective[0]);
  CHECK(modes.defective[1]);

  const ParticipationMatrix pm = participation_factors(modes);
  CHECK_FALSE(pm.valid[0]);
  CHECK_FALSE(pm.valid[1]);
  CHECK_THROWS_AS(dominant_states(pm, 0, 0.1), Error);
}

TEST_CASE("dominant_states honors the threshold semantics") {
  const StateSpaceModel m = reduced_model(three_bus(2.0 / 3.0));
  const ModeSet modes = eigen_decompose(m.A, m.states);
  const ParticipationMatrix pm = participation_factors(modes);

  // the published fast-mode listing: machines 1 and 2 only
  const std::set<std::string> fast = dominant_set(pm, modes, 3.1028);
  CHECK(fast == std::set<std::string>{"omega_G_1", "P_G_1", "omega_G_2", "P_G_2"});

  // threshold 1.0 keeps only exact-unity participations
  for (Index i = 0; i < modes.size(); ++i) {
    if (pm.valid[static_cast<std::size_t>(i)]) {
      CHECK(dominant_states(pm, i, 1.0).empty());
    }
  }
}

TEST_CASE("heavy-machine slow mode spreads over every generator") {
  // exact participation of the slow mode with M3 = 32: machine weights
  // (0.3251, 0.0971, 0.0778) per state, so only machine 1 clears 0.1
  const StateSpaceModel m = reduced_model(three_bus(1.0 / 15.0, 32.0));
  const ModeSet modes = eigen_decompose(m.A, m.states);
  const ParticipationMatrix pm = participation_factors(modes);
  for (Index i = 0; i < modes.size(); ++i) {
    if (std::abs(modes.eigenvalues[i].imag() - 1.45787) < 1e-3) {
      CHECK(pm.p(m.state_index({"1", StateVar::OmegaG}), i) == doctest::Approx(0.32511).epsilon(1e-3));
      CHECK(pm.p(m.state_index({"2", StateVar::OmegaG}), i) == doctest::Approx(0.09713).epsilon(1e-3));
      CHECK(pm.p(m.state_index({"3", StateVar::OmegaG}), i) == doctest::Approx(0.07776).epsilon(1e-3));
    }
  }
  // every generator clears a 0.07 threshold, matching the published grouping
  const std::set<std::string> all = dominant_set(pm, modes, 1.4579, 0.07);
  CHECK(all.size() == 6);
}

TEST_CASE("interconnection mode identified against the disconnected variant") {
  const NetworkModel cis_net = three_bus(1.0 / 15.0);
  const NetworkModel dis_net = disconnect_ties(cis_net);
  const ModeSet cis = eigen_decompose(reduced_model(cis_net).A);
  const ModeSet dis = eigen_decompose(reduced_model(dis_net).A);

  const ModeMatch match = identify_interconnection_mode(cis, dis);
  REQUIRE(match.interconnection.size() == 1);
  CHECK(std::abs(match.interconnection[0].imag() - 2.1650) < 1e-3);
  CHECK(match.cis_zero_count == 2);
  CHECK(match.dis_zero_count == 4);
  CHECK(match.unmatched_dis.empty());
  REQUIRE(match.matched.size() == 1);
  CHECK(std::abs(match.matched[0].cis.imag() - 3.7500) < 1e-3);
  CHECK(std::abs(match.matched[0].dis.imag() - 3.0619) < 1e-3);
}

TEST_CASE("weak-tie interconnection mode") {
  const NetworkModel cis_net = three_bus(2.0 / 3.0);
  const ModeMatch match = identify_interconnection_mode(
      eigen_decompose(reduced_model(cis_net).A),
      eigen_decompose(reduced_model(disconnect_ties(cis_net)).A));
  REQUIRE(match.interconnection.size() == 1);
  CHECK(std::abs(match.interconnection[0].imag() - 0.8274) < 1e-3);
}

TEST_CASE("a system compared against itself has no interconnection modes") {
  const ModeSet modes = eigen_decompose(reduced_model(three_bus(1.0 / 15.0)).A);
  const ModeMatch match = identify_interconnection_mode(modes, modes);
  CHECK(match.interconnection.empty());
  CHECK(match.unmatched_dis.empty());
  CHECK(match.matched.size() == 2);
}

TEST_CASE("symmetric areas make the pairing ambiguous") {
  // two identical two-machine areas: the DIS variant has two coincident local
  // modes, so distance cannot pick a pairing
  const NetworkModel net = build_network(
      {gen_bus("1"), gen_bus("2"), gen_bus("3"), gen_bus("4")},
      {{"1", "2", 1.0 / 15.0}, {"3", "4", 1.0 / 15.0}, {"2", "3", 1.0 / 15.0}},
      {{"a", {"1", "2"}}, {"b", {"3", "4"}}});
  const ModeSet cis = eigen_decompose(reduced_model(net).A);
  const ModeSet dis = eigen_decompose(reduced_model(disconnect_ties(net)).A);
  try {
    identify_interconnection_mode(cis, dis);
    FAIL("expected AmbiguousMatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AmbiguousMatch);
  }
}

TEST_CASE("reduced spectra match the generalized-eigenproblem oracle") {
  std::mt19937 rng(2024);
  for (int iter = 0; iter < 30; ++iter) {
    const oracles::RandomNet rnd = oracles::random_network(rng);
    const NetworkModel net = build_network(rnd.buses, rnd.lines, rnd.areas);
    const StateSpaceModel m = reduced_model(net);
    const ComplexVector computed = oracles::sorted_by_imag(eigen_decompose(m.A).eigenvalues);
    const ComplexVector expected = oracles::swing_spectrum(m.K_P, rnd.inertia);
    const double scale = std::max(1.0, m.A.norm());
    CHECK((computed - expected).cwiseAbs().maxCoeff() < 1e-8 * scale);

    // undamped spectra stay on the imaginary axis
    for (Index i = 0; i < computed.size(); ++i) {
      CHECK(std::abs(computed[i].real()) <
            1e-8 * std::max(1.0, m.A.cwiseAbs().rowwise().sum().maxCoeff()));
    }
  }
}

TEST_CASE("zero-mode count is twice the number of connected components") {
  std::mt19937 rng(5);
  for (int iter = 0; iter < 10; ++iter) {
    oracles::RandomNet rnd = oracles::random_network(rng, 3, 5);
    // split into two areas at a random boundary, then disconnect
    const std::size_t n = rnd.buses.size();
    std::uniform_int_distribution<std::size_t> cut(1, n - 1);
    const std::size_t c = cut(rng);
    std::map<std::string, std::vector<std::string>> areas;
    for (std::size_t i = 0; i < n; ++i) {
      areas[i < c ? "a" : "b"].push_back(rnd.buses[i].id);
    }
    NetworkModel net;
    try {
      net = build_network(rnd.buses, rnd.lines, areas);
    } catch (const Error&) {
      continue;  // random cut split an area interior; not the property target
    }
    const NetworkModel dis = disconnect_ties(net);

    // connected components of the disconnected variant via label propagation
    std::map<std::string, std::string> comp;
    for (const Bus& b : dis.buses) comp[b.id] = b.id;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Line& l : dis.lines) {
        const std::string lo = std::min(comp[l.from], comp[l.to]);
        if (comp[l.from] != lo || comp[l.to] != lo) {
          comp[l.from] = comp[l.to] = lo;
          changed = true;
        }
      }
    }
    std::set<std::string> roots;
    for (const auto& [id, root] : comp) roots.insert(root);

    const ModeClassification cls = classify_modes(eigen_decompose(reduced_model(dis).A));
    CHECK(cls.zero_modes.size() == 2 * roots.size());
  }
}

TEST_CASE("interconnection frequency decreases as the tie weakens") {
  double previous = 1e9;
  for (const double x2 : {1.0 / 15.0, 0.1, 0.2, 0.5, 2.0 / 3.0, 1.0, 2.0}) {
    const NetworkModel net = three_bus(x2);
    const ModeMatch match = identify_interconnection_mode(
        eigen_decompose(reduced_model(net).A),
        eigen_decompose(reduced_model(disconnect_ties(net)).A));
    REQUIRE(match.interconnection.size() == 1);
    const double freq = match.interconnection[0].imag();
    CHECK(freq <= previous + 1e-12);
    previous = freq;
  }
}

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "iaosim/error.hpp"
#include "iaosim/modal.hpp"
#include "iaosim/statespace.hpp"
#include "oracles.hpp"

using namespace iaosim;

namespace {

Bus gen_bus(const std::string& id, double inertia = 3.2, double damping = 0.0) {
  Bus b;
  b.id = id;
  b.kind = BusKind::Generator;
  GeneratorParams p;
  p.inertia = inertia;
  p.damping = damping;
  b.generator = p;
  return b;
}

NetworkModel case1_network() {
  return build_network({gen_bus("1"), gen_bus("2"), gen_bus("3")},
                       {{"1", "2", 1.0 / 15.0}, {"2", "3", 1.0 / 15.0}},
                       {{"1", {"1", "2"}}, {"2", {"3"}}});
}

StateSpaceModel reduced_model(const NetworkModel& net) {
  return assemble_reduced(net, reduce(jacobian(net, OperatingPoint::flat(net.size())), net));
}

}  // namespace

TEST_CASE("gtg_block with the nearly-open-loop governor parameters") {
  GeneratorParams p;
  p.inertia = 3.2;
  p.damping = 0.0;
  p.turbine_time_constant = 1e6;
  p.governor_time_constant = 1e6;
  p.turbine_gain = 1.0;
  p.droop = 0.05;
  const GtgBlock b = gtg_block(p);
  CHECK(b.A_LC(0, 0) == 0.0);
  CHECK(b.A_LC(0, 1) == doctest::Approx(0.3125));
  CHECK(b.A_LC(1, 1) == doctest::Approx(-1e-6));
  CHECK(b.A_LC(1, 2) == doctest::Approx(1e-6));
  CHECK(b.A_LC(2, 0) == doctest::Approx(-1e-6));
  CHECK(b.A_LC(2, 2) == doctest::Approx(-2e-5));
  CHECK(b.c_M(0) == doctest::Approx(-0.3125));
  CHECK(b.c_M(1) == 0.0);
}

TEST_CASE("gtg_block with unit parameters") {
  GeneratorParams p;
  p.inertia = 1.0;
  p.damping = 1.0;
  p.turbine_time_constant = 1.0;
  p.governor_time_constant = 1.0;
  p.turbine_gain = 1.0;
  p.droop = 1.0;
  const GtgBlock b = gtg_block(p);
  Eigen::Matrix3d expected;
  expected << -1, 1, 0, 0, -1, 1, -1, 0, -1;
  CHECK((b.A_LC - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gtg_block first row scales with damping and inertia") {
  GeneratorParams p;
  p.inertia = 2.0;
  p.damping = 0.5;
  const GtgBlock b = gtg_block(p);
  CHECK(b.A_LC(0, 0) == doctest::Approx(-0.25));
  CHECK(b.A_LC(0, 1) == doctest::Approx(0.5));
  CHECK(b.A_LC(0, 2) == 0.0);
}

TEST_CASE("assemble_reduced reproduces the three-machine connected spectrum") {
  const StateSpaceModel m = reduced_model(case1_network());
  REQUIRE(m.A.rows() == 6);

  const ModeSet modes = eigen_decompose(m.A, m.states);
  const ModeClassification cls = classify_modes(modes);
  REQUIRE(cls.oscillatory.size() == 2);
  CHECK(cls.zero_modes.size() == 2);
  CHECK(cls.oscillatory[0].frequency == doctest::Approx(2.1650).epsilon(1e-3));
  CHECK(cls.oscillatory[1].frequency == doctest::Approx(3.7499).epsilon(1e-3));
}

TEST_CASE("assemble_reduced on a two-machine isolated area") {
  const NetworkModel net = build_network({gen_bus("1"), gen_bus("2")},
                                         {{"1", "2", 1.0 / 15.0}}, {{"a", {"1", "2"}}});
  const StateSpaceModel m = reduced_model(net);
  const ModeClassification cls = classify_modes(eigen_decompose(m.A, m.states));
  REQUIRE(cls.oscillatory.size() == 1);
  CHECK(cls.oscillatory[0].frequency == doctest::Approx(3.0618).epsilon(1e-3));
}

TEST_CASE("single machine reduces to the nilpotent block") {
  const NetworkModel net = build_network({gen_bus("1", 2.5)}, {}, {{"a", {"1"}}});
  const StateSpaceModel m = reduced_model(net);
  Matrix expected(2, 2);
  expected << 0, -0.4, 0, 0;
  CHECK((m.A - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((m.A * m.A).cwiseAbs().maxCoeff() == 0.0);  // nilpotent
}

TEST_CASE("assemble_full wires the blocks of the augmented system") {
  const NetworkModel net = case1_network();
  const ReducedNetwork red = reduce(jacobian(net, OperatingPoint::flat(3)), net);
  const StateSpaceModel m = assemble_full(net, red);
  REQUIRE(m.A.rows() == 12);

  // bottom-right block is zero
  CHECK(m.A.block(9, 9, 3, 3).cwiseAbs().maxCoeff() == 0.0);
  // K_P E places K_P against the omega columns (0, 3, 6)
  CHECK(m.A(9, 0) == doctest::Approx(red.K_P(0, 0)));
  CHECK(m.A(9, 3) == doctest::Approx(red.K_P(0, 1)));
  CHECK(m.A(10, 3) == doctest::Approx(red.K_P(1, 1)));
  CHECK(m.A(9, 1) == 0.0);
  // state ordering: local triples then the P_G block
  CHECK(m.states[0].str() == "omega_G_1");
  CHECK(m.states[1].str() == "P_t_1");
  CHECK(m.states[2].str() == "a_1");
  CHECK(m.states[9].str() == "P_G_1");
  // colocated-load disturbance columns act on the P_G rows only
  CHECK(m.B_L.topRows(9).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.B_L(9, 0) == doctest::Approx(1.0));
  CHECK(m.B_L(10, 1) == doctest::Approx(1.0));
}

TEST_CASE("single-machine full model has frozen power state") {
  const NetworkModel net = build_network({gen_bus("1")}, {}, {{"a", {"1"}}});
  const ReducedNetwork red = reduce(jacobian(net, OperatingPoint::flat(1)), net);
  const StateSpaceModel m = assemble_full(net, red);
  CHECK(m.A.row(3).cwiseAbs().maxCoeff() == 0.0);  // dP_G/dt = 0
}

TEST_CASE("load-only buses contribute -D_P columns to B_L") {
  const NetworkModel net = build_network(
      {gen_bus("1"), Bus{"L", BusKind::LoadOnly, std::nullopt, 0.0, ""}, gen_bus("2")},
      {{"1", "L", 1.0 / 15.0}, {"L", "2", 1.0 / 15.0}}, {{"a", {"1", "L", "2"}}});
  const ReducedNetwork red = reduce(jacobian(net, OperatingPoint::flat(3)), net);
  const StateSpaceModel m = assemble_reduced(net, red);
  REQUIRE(m.input_buses == std::vector<std::string>{"1", "L", "2"});
  // column of bus L = -D_P = +0.5 on both machines
  CHECK(m.B_L(2, 1) == doctest::Approx(0.5));
  CHECK(m.B_L(3, 1) == doctest::Approx(0.5));
  // colocated columns stay unit
  CHECK(m.B_L(2, 0) == doctest::Approx(1.0));
  CHECK(m.B_L(3, 2) == doctest::Approx(1.0));
}

TEST_CASE("P_G columns of the reduced system conserve total power") {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 10; ++iter) {
    const oracles::RandomNet rnd = oracles::random_network(rng);
    const NetworkModel net = build_network(rnd.buses, rnd.lines, rnd.areas);
    const StateSpaceModel m = reduced_model(net);
    const Index n = net.size();
    // e^T K_P = 0 makes e^T dP_G/dt vanish along any trajectory
    CHECK(m.A.block(n, 0, n, n).colwise().sum().cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("full model converges to the reduced spectrum for slow governors") {
  const NetworkModel net = case1_network();
  const ReducedNetwork red = reduce(jacobian(net, OperatingPoint::flat(3)), net);
  const StateSpaceModel full = assemble_full(net, red);
  const StateSpaceModel reduced = assemble_reduced(net, red);

  const ModeClassification fc = classify_modes(eigen_decompose(full.A, full.states));
  const ModeClassification rc = classify_modes(eigen_decompose(reduced.A, reduced.states));
  REQUIRE(rc.oscillatory.size() == 2);
  for (const OscillatoryPair& rp : rc.oscillatory) {
    double best = 1e9;
    for (const OscillatoryPair& fp : fc.oscillatory) {
      best = std::min(best, std::abs(fp.frequency - rp.frequency));
    }
    CHECK(best < 1e-3);
  }
}

TEST_CASE("relabeling generators is a similarity transform") {
  const NetworkModel a = case1_network();
  const NetworkModel b = build_network({gen_bus("3"), gen_bus("1"), gen_bus("2")},
                                       {{"1", "2", 1.0 / 15.0}, {"2", "3", 1.0 / 15.0}},
                                       {{"1", {"1", "2"}}, {"2", {"3"}}});
  const ComplexVector sa =
      oracles::sorted_by_imag(eigen_decompose(reduced_model(a).A).eigenvalues);
  const ComplexVector sb =
      oracles::sorted_by_imag(eigen_decompose(reduced_model(b).A).eigenvalues);
  CHECK((sa - sb).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("dimension mismatches are rejected") {
  const NetworkModel net = case1_network();
  ReducedNetwork red = reduce(jacobian(net, OperatingPoint::flat(3)), net);
  red.K_P = Matrix::Zero(2, 2);  // wrong size for three machines
  CHECK_THROWS_AS(assemble_reduced(net, red), Error);
  CHECK_THROWS_AS(assemble_full(net, red), Error);
}

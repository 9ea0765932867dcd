#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crnkit/dsl.hpp"
#include "crnkit/simulate.hpp"
#include "support.hpp"

namespace crnkit {
namespace {

using testing::random_positive;

TEST(Integrator, ExponentialDecay) {
  IntegrationOptions opts;
  opts.horizon = 3.0;
  opts.output_times = {1.0, 2.0};
  const auto res = integrate_field([](double, const Vector& x) -> Vector { return -x; },
                                   Vector::Ones(1), opts);
  ASSERT_GE(res.records.size(), 4u);
  EXPECT_EQ(res.records.front().t, 0.0);
  EXPECT_EQ(res.records.back().t, 3.0);
  EXPECT_NEAR(res.records.back().x[0], std::exp(-3.0), 1e-8 * std::exp(-3.0) + 1e-10);
  bool saw_one = false;
  for (const auto& r : res.records) saw_one = saw_one || r.t == 1.0;
  EXPECT_TRUE(saw_one);
}

TEST(Integrator, RejectsNonpositiveStart) {
  EXPECT_THROW(integrate_field([](double, const Vector& x) -> Vector { return -x; },
                               Vector::Zero(1), {}),
               NonPositiveConcentration);
}

TEST(Integrator, BreakpointsAreLandedOn) {
  IntegrationOptions opts;
  opts.horizon = 2.0;
  opts.breakpoints = {1.0};
  opts.record_steps = false;
  opts.output_times = {1.0};
  // xdot = 1 on [0,1), 3 on [1,2]
  const auto res = integrate_field(
      [](double t, const Vector&) -> Vector { return Vector::Constant(1, t < 1.0 ? 1.0 : 3.0); },
      Vector::Ones(1), opts);
  EXPECT_NEAR(res.records[1].x[0], 2.0, 1e-12);
  EXPECT_NEAR(res.records.back().x[0], 5.0, 1e-12);
}

TEST(Schedule, LeftClosedSegments) {
  PiecewiseConstantSchedule s{{0.0, 1.0}, {Vector::Constant(1, 2.0), Vector::Constant(1, -1.0)}};
  EXPECT_EQ(s(0.5)[0], 2.0);
  EXPECT_EQ(s(1.0)[0], -1.0);
  EXPECT_EQ(s.breakpoints(0.0), std::vector<double>{1.0});
}

TEST(Simulate, UnimolecularClosedForm) {
  const auto p = testing::prepare("A <-> B ; kf=1 kr=1");
  IntegrationOptions opts;
  opts.horizon = 2.0;
  opts.output_times = {1.0};
  const auto traj = integrate(BalancedSystem(p.g, p.bf), (Vector(2) << 1.5, 0.5).finished(), opts);
  const Vector& x = traj.state_at(1.0);
  const double e = 0.5 * std::exp(-2.0);
  EXPECT_LE(std::abs(x[0] - (1 + e)) / (1 + e), 1e-6);
  EXPECT_LE(std::abs(x[1] - (1 - e)) / (1 - e), 1e-6);
}

TEST(Simulate, EquilibriumStaysPut) {
  const auto p = testing::prepare(testing::kEnzymatic);
  const auto traj = integrate(BalancedSystem(p.g, p.bf), p.bf.x_star);
  for (const auto& x : traj.states) {
    EXPECT_LE((x - p.bf.x_star).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Simulate, EnzymaticEndpointMatchesChi) {
  const auto p = testing::prepare(testing::kEnzymatic);
  std::mt19937_64 rng(21);
  IntegrationOptions opts;
  opts.horizon = 100.0;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-12;
  for (int s = 0; s < 5; ++s) {
    const Vector x0 = random_positive(rng, 4);
    const auto traj = integrate(BalancedSystem(p.g, p.bf), x0, opts);
    const Vector x1 = chi_map(p.bf, p.g, x0).x1;
    EXPECT_LE((traj.final_state() - x1).cwiseAbs().maxCoeff(), 1e-5 * x0.cwiseAbs().maxCoeff());
  }
}

TEST(Simulate, ToEquilibriumStopsEarly) {
  const auto p = testing::prepare(testing::kTwoReactions);
  IntegrationOptions opts;
  opts.horizon = 1e4;
  opts.to_equilibrium = true;
  opts.rel_tol = 1e-11;
  opts.abs_tol = 1e-13;
  opts.equilibrium_tol = 1e-9;
  const Vector x0 = (Vector(3) << 0.3, 2.0, 1.1).finished();
  const auto traj = integrate(BalancedSystem(p.g, p.bf), x0, opts);
  EXPECT_TRUE(traj.reached_equilibrium);
  EXPECT_LT(traj.times.back(), 1e4);
  EXPECT_LE((traj.final_state() - chi_map(p.bf, p.g, x0).x1).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Simulate, LyapunovInvariants) {
  std::mt19937_64 rng(22);
  for (const auto& text : testing::balanced_networks()) {
    const auto p = testing::prepare(text);
    for (int s = 0; s < 5; ++s) {
      const Vector x0 = random_positive(rng, static_cast<Eigen::Index>(p.net.num_species()));
      IntegrationOptions opts;
      opts.horizon = 20.0;
      const auto traj = integrate(BalancedSystem(p.g, p.bf), x0, opts);
      const auto rep = check_invariants(traj);
      EXPECT_TRUE(rep.positive) << text;
      EXPECT_TRUE(rep.gibbs_nonincreasing) << text << " increase " << rep.max_gibbs_increase;
      EXPECT_TRUE(rep.moieties_constant) << text << " drift " << rep.max_moiety_drift;
      for (const auto& d : traj.diagnostics) {
        EXPECT_LE(d.dGdt, 1e-12);
        EXPECT_GE(d.dissipation, -1e-12);
      }
    }
  }
}

// Halving both tolerances moves the endpoint by no more than the coarse run's
// accumulated local error estimate.
TEST(Simulate, ToleranceHalvingConverges) {
  std::mt19937_64 rng(23);
  for (const auto& text : testing::balanced_networks()) {
    const auto p = testing::prepare(text);
    const Vector x0 = random_positive(rng, static_cast<Eigen::Index>(p.net.num_species()));
    IntegrationOptions coarse;
    coarse.horizon = 5.0;
    IntegrationOptions fine = coarse;
    fine.rel_tol /= 2;
    fine.abs_tol /= 2;
    const BalancedSystem sys(p.g, p.bf);
    const auto a = integrate(sys, x0, coarse);
    const auto b = integrate(sys, x0, fine);
    double bound = 0.0;
    for (std::size_t k = 1; k < a.states.size(); ++k) {
      bound += a.diagnostics[k].error_estimate *
               (coarse.abs_tol + coarse.rel_tol * a.states[k].cwiseAbs().maxCoeff());
    }
    EXPECT_LE((a.final_state() - b.final_state()).cwiseAbs().maxCoeff(), bound) << text;
  }
}

// Large, fast reaction pushing a species towards zero; steps must stay positive.
TEST(Simulate, PositivityUnderStiffDepletion) {
  const auto p = testing::prepare("A <-> B ; kf=1000 kr=0.001");
  const auto traj = integrate(BalancedSystem(p.g, p.bf), (Vector(2) << 1.0, 1e-3).finished());
  EXPECT_TRUE(check_invariants(traj).ok());
  EXPECT_GT(traj.final_state().minCoeff(), 0.0);
}

TEST(Open, OutputsExamples) {
  const auto net = parse_network(testing::kOpenExample);
  const auto g = build_complex_graph(net);
  const auto bf = *find_thermodynamic_equilibrium(net, g).form;
  const IntMatrix sb = boundary_matrix(net);
  EXPECT_LE(open_outputs(bf, sb, bf.x_star).cwiseAbs().maxCoeff(), 0.0);
  Vector x = bf.x_star;
  x[2] *= 2.0;
  x[5] *= 3.0;
  const Vector mu_b = open_outputs(bf, sb, x);
  EXPECT_NEAR(mu_b[0], std::log(2.0), 1e-15);
  EXPECT_NEAR(mu_b[1], -std::log(3.0), 1e-15);

  const auto single = parse_network("A <-> B ; kf=1 kr=1\nboundary: A in");
  const auto gs = build_complex_graph(single);
  const auto bfs = verify_declared_equilibrium(single, gs, Vector::Ones(2));
  EXPECT_NEAR(open_outputs(bfs, boundary_matrix(single), (Vector(2) << M_E, 1.0).finished())[0],
              1.0, 1e-15);
}

TEST(Open, ConstantInfluxIsPassive) {
  const auto net = parse_network("A <-> B ; kf=1 kr=1\nB <-> C ; kf=2 kr=1\nboundary: A in");
  const auto g = build_complex_graph(net);
  const auto bf = *find_thermodynamic_equilibrium(net, g).form;
  BalancedSystem sys(g, bf, boundary_matrix(net), [](double) { return Vector::Constant(1, 0.7); });
  IntegrationOptions opts;
  opts.horizon = 10.0;
  const auto traj = integrate(sys, Vector::Ones(3), opts);
  const auto rep = passivity_check(traj);
  EXPECT_TRUE(rep.holds) << rep.max_violation;
  EXPECT_TRUE(rep.cumulative_holds);
  EXPECT_GE(rep.min_dissipation, -1e-12);
  // Mass grows exactly by the influx.
  EXPECT_NEAR(traj.final_state().sum(), 3.0 + 7.0, 1e-6);
}

TEST(Open, ClosedSystemReducesToDecrease) {
  const auto p = testing::prepare(testing::kTriangle);
  const auto traj = integrate(BalancedSystem(p.g, p.bf), (Vector(3) << 2.0, 0.5, 1.0).finished());
  const auto rep = passivity_check(traj);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.max_violation, 1e-12);
}

TEST(Open, ZeroInputAtEquilibrium) {
  const auto net = parse_network(testing::kOpenExample);
  const auto g = build_complex_graph(net);
  const auto bf = *find_thermodynamic_equilibrium(net, g).form;
  BalancedSystem sys(g, bf, boundary_matrix(net), [](double) { return Vector::Zero(2); });
  IntegrationOptions opts;
  opts.horizon = 1.0;
  const auto traj = integrate(sys, bf.x_star, opts);
  for (const auto& d : traj.diagnostics) {
    EXPECT_LE(std::abs(d.dGdt), 1e-12);
    EXPECT_LE(std::abs(d.supply), 1e-12);
  }
}

TEST(Open, ScheduledInputsSwitchExactly) {
  const auto net = parse_network("A <-> B ; kf=1 kr=1\nboundary: A in\nboundary: B out");
  const auto g = build_complex_graph(net);
  const auto bf = verify_declared_equilibrium(net, g, Vector::Ones(2));
  PiecewiseConstantSchedule sched{{0.0, 2.0},
                                  {(Vector(2) << 0.5, 0.5).finished(),
                                   (Vector(2) << 0.0, 0.2).finished()}};
  BalancedSystem sys(g, bf, boundary_matrix(net), sched);
  IntegrationOptions opts;
  opts.horizon = 4.0;
  opts.breakpoints = sched.breakpoints(0.0);
  const auto traj = integrate(sys, Vector::Ones(2), opts);
  // Total mass: constant until t = 2, then drains at rate 0.2.
  EXPECT_NEAR(traj.state_at(2.0).sum(), 2.0, 1e-9);
  EXPECT_NEAR(traj.final_state().sum(), 2.0 - 0.4, 1e-8);
  EXPECT_TRUE(passivity_check(traj).holds);
}

}  // namespace
}  // namespace crnkit

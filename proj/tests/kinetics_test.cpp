#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crnkit/dsl.hpp"
#include "crnkit/kinetics.hpp"
#include "support.hpp"

namespace crnkit {
namespace {

using testing::random_positive;
using testing::rel_err;

// Rates straight from the definition: kf prod x^a - kr prod x^b.
double direct_rate(const Reaction& rx, const Vector& x) {
  double fwd = rx.k_forw;
  double rev = rx.k_rev;
  for (const auto& t : rx.substrate) fwd *= std::pow(x[t.species], double(t.coefficient));
  for (const auto& t : rx.product) rev *= std::pow(x[t.species], double(t.coefficient));
  return fwd - rev;
}

TEST(Kinetics, MassActionRate) {
  const auto net = parse_network("X1 + X2 <-> X3 ; kf=3 kr=0.5");
  const auto g = build_complex_graph(net);
  const Vector x = (Vector(3) << 2.0, 5.0, 7.0).finished();
  EXPECT_NEAR(mass_action_rates(net, g, x)[0], 3 * 2 * 5 - 0.5 * 7, 1e-12);

  const auto ab = parse_network("A <-> B ; kf=2 kr=1");
  EXPECT_DOUBLE_EQ(mass_action_rates(ab, build_complex_graph(ab), Vector::Ones(2))[0], 1.0);
}

TEST(Kinetics, RatesMatchDirectEvaluation) {
  std::mt19937_64 rng(2);
  for (const auto& text : testing::balanced_networks()) {
    const auto net = parse_network(text);
    const auto g = build_complex_graph(net);
    for (int s = 0; s < 50; ++s) {
      const Vector x = random_positive(rng, static_cast<Eigen::Index>(net.num_species()));
      const Vector v = mass_action_rates(net, g, x);
      for (std::size_t j = 0; j < net.num_reactions(); ++j) {
        const double d = direct_rate(net.reactions[j], x);
        EXPECT_NEAR(v[j], d, 1e-12 * std::max(1.0, std::abs(d)));
      }
    }
  }
}

TEST(Kinetics, IrreversibleGeneralField) {
  const auto net = parse_network("A -> B ; kf=4");
  const auto g = build_complex_graph(net);
  const Vector xdot = general_dynamics(g, general_laplacian(net, g), Vector::Ones(2));
  EXPECT_NEAR(xdot[0], -4.0, 1e-14);
  EXPECT_NEAR(xdot[1], 4.0, 1e-14);
}

TEST(Kinetics, GeneralLaplacianColumnsSumToZero) {
  const auto net = parse_network(testing::kTriangle);
  const auto lap = general_laplacian(net, build_complex_graph(net));
  EXPECT_LE(lap.laplacian.colwise().sum().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Kinetics, ThreeWayIdentity) {
  std::mt19937_64 rng(9);
  for (const auto& text : testing::balanced_networks()) {
    const auto p = testing::prepare(text);
    const auto lap = general_laplacian(p.net, p.g);
    for (int s = 0; s < 200; ++s) {
      const Vector x = random_positive(rng, static_cast<Eigen::Index>(p.net.num_species()));
      const Vector a = stoichiometric_dynamics(p.net, p.g, x);
      EXPECT_LE(rel_err(a, general_dynamics(p.g, lap, x)), 1e-10) << text;
      EXPECT_LE(rel_err(a, balanced_dynamics(p.bf, p.g, x)), 1e-10) << text;
    }
  }
}

TEST(Kinetics, BalancedFieldVanishesAtEquilibrium) {
  for (const auto& text : testing::balanced_networks()) {
    const auto p = testing::prepare(text);
    EXPECT_LE(balanced_dynamics(p.bf, p.g, p.bf.x_star).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(mass_action_rates(p.net, p.g, p.bf.x_star).cwiseAbs().maxCoeff(),
              1e-12 * p.bf.kappa.maxCoeff());
  }
}

TEST(Kinetics, SymmetricTriangleBalanced) {
  const auto net = parse_network("A <-> B ; kf=1 kr=1\nB <-> C ; kf=1 kr=1\nC <-> A ; kf=1 kr=1");
  const auto g = build_complex_graph(net);
  const auto res = find_thermodynamic_equilibrium(net, g);
  ASSERT_TRUE(res.balanced());
  EXPECT_NO_THROW(verify_declared_equilibrium(net, g, Vector::Ones(3)));
}

TEST(Kinetics, PerturbedTriangleCertificate) {
  const auto net = parse_network("A <-> B ; kf=2 kr=1\nB <-> C ; kf=1 kr=1\nC <-> A ; kf=1 kr=1");
  const auto res = find_thermodynamic_equilibrium(net, build_complex_graph(net));
  ASSERT_FALSE(res.balanced());
  const auto* cert = std::get_if<WegscheiderCertificate>(&res.certificate);
  ASSERT_NE(cert, nullptr);
  EXPECT_EQ(cert->sigma, (IntVector(3) << 1, 1, 1).finished());
  EXPECT_NEAR(cert->violation, std::log(2.0), 1e-15);
  EXPECT_GT(res.residual, 0.1);
}

TEST(Kinetics, IrreversibleCertificate) {
  const auto net = parse_network("A <-> B ; kf=1 kr=1\nB -> C ; kf=1");
  const auto res = find_thermodynamic_equilibrium(net, build_complex_graph(net));
  ASSERT_FALSE(res.balanced());
  ASSERT_TRUE(std::holds_alternative<IrreversibleCertificate>(res.certificate));
  EXPECT_EQ(std::get<IrreversibleCertificate>(res.certificate).reaction, 1u);
  EXPECT_TRUE(std::isnan(res.residual));
}

// Full row rank S^T: no cycles, so any positive constants are balanced.
TEST(Kinetics, FullRowRankAlwaysBalanced) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> k(0.01, 100.0);
  for (int t = 0; t < 50; ++t) {
    auto net = parse_network(testing::kEnzymatic);
    for (auto& rx : net.reactions) {
      rx.k_forw = k(rng);
      rx.k_rev = k(rng);
    }
    const auto g = build_complex_graph(net);
    const auto res = find_thermodynamic_equilibrium(net, g);
    ASSERT_TRUE(res.balanced());
    EXPECT_LE(res.residual, 1e-12);
    EXPECT_NO_THROW(verify_declared_equilibrium(net, g, res.form->x_star));
  }
}

// Oracle: a triangle is balanced iff kf1 kf2 kf3 = kr1 kr2 kr3.
TEST(Kinetics, TriangleCycleProductOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> k(0.1, 10.0);
  for (int t = 0; t < 100; ++t) {
    double kf[3], kr[3];
    for (int j = 0; j < 3; ++j) {
      kf[j] = k(rng);
      kr[j] = k(rng);
    }
    if (t % 2 == 0) kr[2] = kf[0] * kf[1] * kf[2] / (kr[0] * kr[1]);
    ReactionNetwork net;
    net.species = {"A", "B", "C"};
    for (int j = 0; j < 3; ++j) {
      net.reactions.push_back({{{std::size_t(j), 1}}, {{std::size_t((j + 1) % 3), 1}}, kf[j], kr[j]});
    }
    const bool expected = t % 2 == 0;
    EXPECT_EQ(find_thermodynamic_equilibrium(net, build_complex_graph(net)).balanced(), expected);
  }
}

TEST(Kinetics, DeclaredEquilibrium) {
  const auto one = parse_network("A <-> B ; kf=1 kr=1");
  const auto g1 = build_complex_graph(one);
  EXPECT_DOUBLE_EQ(verify_declared_equilibrium(one, g1, Vector::Ones(2)).kappa[0], 1.0);

  const auto two = parse_network("A <-> B ; kf=2 kr=1");
  const auto g2 = build_complex_graph(two);
  EXPECT_DOUBLE_EQ(
      verify_declared_equilibrium(two, g2, (Vector(2) << 1.0, 2.0).finished()).kappa[0], 2.0);
  try {
    verify_declared_equilibrium(two, g2, Vector::Ones(2));
    FAIL() << "expected a violation";
  } catch (const DetailedBalanceViolation& e) {
    EXPECT_EQ(e.reaction(), 0u);
    EXPECT_DOUBLE_EQ(e.forward(), 2.0);
    EXPECT_DOUBLE_EQ(e.reverse(), 1.0);
  }
}

TEST(Kinetics, ScalingCheck) {
  const auto net = parse_network("A <-> B ; kf=1 kr=1");
  const auto g = build_complex_graph(net);
  const auto a = verify_declared_equilibrium(net, g, Vector::Ones(2));
  const auto b = verify_declared_equilibrium(net, g, Vector::Constant(2, 2.0));
  const auto d = equilibrium_scaling_check(a, b, g);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0], 2.0, 1e-14);
  EXPECT_NEAR(equilibrium_scaling_check(a, a, g)[0], 1.0, 0.0);

  const auto enz = testing::prepare(testing::kEnzymatic);
  Vector x2 = enz.bf.x_star;
  x2[2] *= 3.0;
  x2[3] *= 3.0;
  const auto bf2 = verify_declared_equilibrium(enz.net, enz.g, x2);
  EXPECT_NEAR(equilibrium_scaling_check(enz.bf, bf2, enz.g)[0], 3.0, 1e-12);
}

TEST(Kinetics, ScalingCheckRejectsNonUniform) {
  const auto p = testing::prepare(testing::kEnzymatic);
  BalancedForm other = p.bf;
  other.kappa[0] *= 2.0;
  EXPECT_THROW(equilibrium_scaling_check(p.bf, other, p.g), NonUniformScaling);
}

TEST(Kinetics, NonPositiveStateRejected) {
  const auto p = testing::prepare("A <-> B ; kf=1 kr=1");
  EXPECT_THROW(balanced_dynamics(p.bf, p.g, (Vector(2) << 1.0, 0.0).finished()),
               NonPositiveConcentration);
}

}  // namespace
}  // namespace crnkit

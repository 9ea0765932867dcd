#include "crnkit/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crnkit/dsl.hpp"
#include "crnkit/rational.hpp"

namespace crnkit {
namespace {

void require_sizes(const ReactionNetwork& net, const ComplexGraph& g) {
  if (g.num_species() != net.num_species() || g.num_reactions() != net.num_reactions()) {
    throw InvalidArgument("complex graph does not belong to this network");
  }
}

void require_length(const Vector& x, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(x.size()) != n) {
    throw InvalidArgument(std::string(what) + " has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(n));
  }
}

// Z^T Ln x for every complex.
Vector complex_log_activity(const ComplexGraph& g, const Vector& x) {
  require_length(x, g.num_species(), "concentration vector");
  require_positive(x);
  return to_double(g.Z).transpose() * x.array().log().matrix();
}

}  // namespace

GeneralLaplacian general_laplacian(const ReactionNetwork& net, const ComplexGraph& g) {
  require_sizes(net, g);
  const auto c = static_cast<Eigen::Index>(g.num_complexes());
  GeneralLaplacian out;
  out.adjacency = Matrix::Zero(c, c);
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    const auto s = static_cast<Eigen::Index>(g.substrate[j]);
    const auto p = static_cast<Eigen::Index>(g.product[j]);
    out.adjacency(p, s) += net.reactions[j].k_forw;
    out.adjacency(s, p) += net.reactions[j].k_rev;
  }
  out.laplacian = -out.adjacency;
  const Vector col_sums = out.adjacency.colwise().sum().transpose();
  out.laplacian.diagonal() += col_sums;
  return out;
}

Vector mass_action_rates(const ReactionNetwork& net, const ComplexGraph& g, const Vector& x) {
  require_sizes(net, g);
  const Vector log_act = complex_log_activity(g, x);
  Vector v(static_cast<Eigen::Index>(net.num_reactions()));
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    const auto& rx = net.reactions[j];
    const double fwd =
        rx.k_forw > 0.0
            ? rx.k_forw * std::exp(log_act[static_cast<Eigen::Index>(g.substrate[j])])
            : 0.0;
    const double rev =
        rx.k_rev > 0.0 ? rx.k_rev * std::exp(log_act[static_cast<Eigen::Index>(g.product[j])])
                       : 0.0;
    v[static_cast<Eigen::Index>(j)] = fwd - rev;
  }
  return v;
}

Vector stoichiometric_dynamics(const ReactionNetwork& net, const ComplexGraph& g,
                               const Vector& x) {
  return to_double(g.stoichiometric_matrix()) * mass_action_rates(net, g, x);
}

Vector general_dynamics(const ComplexGraph& g, const GeneralLaplacian& lap, const Vector& x) {
  const Vector activity = complex_log_activity(g, x).array().exp().matrix();
  return -(to_double(g.Z) * (lap.laplacian * activity));
}

Vector equilibrium_constants(const ReactionNetwork& net) {
  Vector keq(static_cast<Eigen::Index>(net.num_reactions()));
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    const auto& rx = net.reactions[j];
    if (rx.k_rev == 0.0) {
      throw InvalidArgument("reaction " + std::to_string(j) +
                            " is irreversible; its equilibrium constant is undefined");
    }
    keq[static_cast<Eigen::Index>(j)] = rx.k_forw / rx.k_rev;
  }
  return keq;
}

BalancedForm make_balanced_form(const ComplexGraph& g, Vector x_star, Vector kappa) {
  require_length(x_star, g.num_species(), "x*");
  require_length(kappa, g.num_reactions(), "kappa");
  require_positive(x_star);
  for (Eigen::Index j = 0; j < kappa.size(); ++j) {
    if (!(kappa[j] > 0.0) || !std::isfinite(kappa[j])) {
      throw InvalidArgument("balanced reaction constants must be positive");
    }
  }
  BalancedForm bf;
  const Matrix b = to_double(g.B);
  bf.laplacian = b * kappa.asDiagonal() * b.transpose();
  bf.x_star = std::move(x_star);
  bf.kappa = std::move(kappa);
  return bf;
}

Vector balanced_dynamics(const BalancedForm& bf, const ComplexGraph& g, const Vector& x) {
  require_length(x, g.num_species(), "concentration vector");
  require_positive(x);
  const Vector mu = (x.array() / bf.x_star.array()).log().matrix();
  const Vector activity = (to_double(g.Z).transpose() * mu).array().exp().matrix();
  return -(to_double(g.Z) * (bf.laplacian * activity));
}

DetailedBalanceViolation::DetailedBalanceViolation(std::size_t reaction, double forward,
                                                   double reverse)
    : Error("detailed balance violated by reaction " + std::to_string(reaction) +
            ": forward " + format_double(forward) + " != reverse " + format_double(reverse)),
      reaction_(reaction),
      forward_(forward),
      reverse_(reverse) {}

BalancedForm verify_declared_equilibrium(const ReactionNetwork& net, const ComplexGraph& g,
                                         const Vector& x_star, double rel_tol) {
  require_sizes(net, g);
  const Vector log_act = complex_log_activity(g, x_star);
  Vector kappa(static_cast<Eigen::Index>(net.num_reactions()));
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    const auto& rx = net.reactions[j];
    const double fwd = rx.k_forw * std::exp(log_act[static_cast<Eigen::Index>(g.substrate[j])]);
    const double rev = rx.k_rev * std::exp(log_act[static_cast<Eigen::Index>(g.product[j])]);
    if (!(std::abs(fwd - rev) <= rel_tol * std::max(std::abs(fwd), std::abs(rev))) ||
        fwd == 0.0) {
      throw DetailedBalanceViolation(j, fwd, rev);
    }
    kappa[static_cast<Eigen::Index>(j)] = fwd;
  }
  return make_balanced_form(g, x_star, std::move(kappa));
}

BalanceResult find_thermodynamic_equilibrium(const ReactionNetwork& net, const ComplexGraph& g,
                                             double rel_tol) {
  require_sizes(net, g);
  BalanceResult result;
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    if (!net.reactions[j].reversible()) {
      result.certificate = IrreversibleCertificate{j};
      result.residual = std::numeric_limits<double>::quiet_NaN();
      return result;
    }
  }
  const Vector log_keq = equilibrium_constants(net).array().log().matrix();
  const IntMatrix s = g.stoichiometric_matrix();

  // Ln Keq lies in im S^T iff it is orthogonal to every cycle sigma in ker S.
  for (const IntVector& sigma : exact::right_kernel(s)) {
    const Vector sd = sigma.cast<double>();
    const double value = sd.dot(log_keq);
    const double scale = sd.cwiseAbs().dot(log_keq.cwiseAbs());
    if (std::abs(value) > rel_tol * std::max(1.0, scale)) {
      result.certificate = WegscheiderCertificate{sigma, value};
      const Matrix st = to_double(s).transpose();
      const Vector w = st.completeOrthogonalDecomposition().solve(log_keq);
      result.residual = (st * w - log_keq).cwiseAbs().maxCoeff();
      return result;
    }
  }

  const Matrix st = to_double(s).transpose();
  Vector w = Vector::Zero(static_cast<Eigen::Index>(net.num_species()));
  if (st.rows() > 0 && st.cols() > 0) w = st.completeOrthogonalDecomposition().solve(log_keq);
  result.residual = st.rows() > 0 ? (st * w - log_keq).cwiseAbs().maxCoeff() : 0.0;
  const Vector x_star = w.array().exp().matrix();
  const Vector log_act = to_double(g.Z).transpose() * w;
  Vector kappa(static_cast<Eigen::Index>(net.num_reactions()));
  for (std::size_t j = 0; j < net.num_reactions(); ++j) {
    const auto& rx = net.reactions[j];
    // Geometric mean of both sides of detailed balance; equal up to rounding.
    const double log_fwd = std::log(rx.k_forw) + log_act[static_cast<Eigen::Index>(g.substrate[j])];
    const double log_rev = std::log(rx.k_rev) + log_act[static_cast<Eigen::Index>(g.product[j])];
    kappa[static_cast<Eigen::Index>(j)] = std::exp(0.5 * (log_fwd + log_rev));
  }
  result.form = make_balanced_form(g, x_star, std::move(kappa));
  return result;
}

std::vector<double> equilibrium_scaling_check(const BalancedForm& first,
                                              const BalancedForm& second,
                                              const ComplexGraph& g, double rel_tol) {
  return kappa_scaling_factors(first.kappa, second.kappa, g, rel_tol);
}

std::vector<double> kappa_scaling_factors(const Vector& first, const Vector& second,
                                          const ComplexGraph& g, double rel_tol) {
  if (first.size() != second.size() ||
      static_cast<std::size_t>(first.size()) != g.num_reactions()) {
    throw InvalidArgument("balanced constants belong to different networks");
  }
  std::vector<double> factors;
  for (std::size_t p = 0; p < g.num_classes(); ++p) {
    const auto reactions = g.class_reactions(p);
    if (reactions.empty()) {
      factors.push_back(1.0);
      continue;
    }
    const auto j0 = static_cast<Eigen::Index>(reactions.front());
    const double d = second[j0] / first[j0];
    for (auto j : reactions) {
      const auto ji = static_cast<Eigen::Index>(j);
      const double ratio = second[ji] / first[ji];
      if (std::abs(ratio - d) > rel_tol * d) {
        throw NonUniformScaling("balanced constants of linkage class " + std::to_string(p) +
                                " do not scale uniformly (reaction " + std::to_string(j) +
                                ": " + format_double(ratio) + " vs " + format_double(d) + ")");
      }
    }
    factors.push_back(d);
  }
  return factors;
}

}  // namespace crnkit

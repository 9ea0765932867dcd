#pragma once

// Mass action kinetics on the complex graph: rate evaluation, the general
// (non-symmetric) Laplacian form, detailed balance and the balanced form
// built around a thermodynamic equilibrium x*.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "crnkit/linalg.hpp"
#include "crnkit/network.hpp"
#include "crnkit/structure.hpp"

namespace crnkit {

/// Weighted adjacency of the augmented graph and its Laplacian L = Delta - A.
/// For reaction j from complex s to complex p: A(p, s) = k_forw, A(s, p) = k_rev.
/// Delta holds the column sums of A, so every column of L sums to zero.
struct GeneralLaplacian {
  Matrix adjacency;
  Matrix laplacian;
};

GeneralLaplacian general_laplacian(const ReactionNetwork& net, const ComplexGraph& g);

/// Net mass action flux of every reaction, evaluated in log space.
Vector mass_action_rates(const ReactionNetwork& net, const ComplexGraph& g, const Vector& x);

/// S v(x) evaluated directly from the rates.
Vector stoichiometric_dynamics(const ReactionNetwork& net, const ComplexGraph& g,
                               const Vector& x);

/// -Z L Exp(Z^T Ln x).
Vector general_dynamics(const ComplexGraph& g, const GeneralLaplacian& lap, const Vector& x);

/// k_forw / k_rev per reaction. Throws InvalidArgument if any k_rev is zero.
Vector equilibrium_constants(const ReactionNetwork& net);

/// Standard form of a balanced network around a thermodynamic equilibrium.
struct BalancedForm {
  Vector x_star;      // positive, v(x_star) = 0
  Vector kappa;       // balanced reaction constants, one per reaction
  Matrix laplacian;   // B diag(kappa) B^T, symmetric PSD with zero row sums
};

/// Assembles a BalancedForm from x* and kappa (no detailed balance check).
BalancedForm make_balanced_form(const ComplexGraph& g, Vector x_star, Vector kappa);

/// -Z B K B^T Exp(Z^T Ln(x / x*)).
Vector balanced_dynamics(const BalancedForm& bf, const ComplexGraph& g, const Vector& x);

/// Reaction j has k_forw = 0 or k_rev = 0, so no thermodynamic equilibrium exists.
struct IrreversibleCertificate {
  std::size_t reaction = 0;
};

/// sigma S^T = 0 but sum_j sigma_j ln Keq_j != 0: a violated cycle condition.
struct WegscheiderCertificate {
  IntVector sigma;
  double violation = 0.0;  // sum_j sigma_j ln Keq_j
};

using InfeasibilityCertificate =
    std::variant<std::monostate, IrreversibleCertificate, WegscheiderCertificate>;

struct BalanceResult {
  std::optional<BalancedForm> form;
  InfeasibilityCertificate certificate;
  /// max |S^T w - Ln Keq| for the minimum-norm least-squares w; NaN when the
  /// network has an irreversible reaction.
  double residual = 0.0;

  bool balanced() const { return form.has_value(); }
};

/// Decides detailed balance feasibility from an exact basis of the cycle
/// space {sigma : S sigma = 0} and, when feasible, returns the balanced form at
/// x* = Exp(w) for the minimum-norm solution of S^T w = Ln Keq.
BalanceResult find_thermodynamic_equilibrium(const ReactionNetwork& net, const ComplexGraph& g,
                                             double rel_tol = 1e-9);

/// A declared x* violates detailed balance for some reaction.
class DetailedBalanceViolation : public Error {
 public:
  DetailedBalanceViolation(std::size_t reaction, double forward, double reverse);
  std::size_t reaction() const { return reaction_; }
  double forward() const { return forward_; }
  double reverse() const { return reverse_; }

 private:
  std::size_t reaction_;
  double forward_;
  double reverse_;
};

/// Checks k_forw exp(Z_S^T Ln x*) = k_rev exp(Z_P^T Ln x*) for every reaction
/// (relative tolerance) and builds the balanced form on success.
BalancedForm verify_declared_equilibrium(const ReactionNetwork& net, const ComplexGraph& g,
                                         const Vector& x_star, double rel_tol = 1e-9);

class NonUniformScaling : public Error {
 public:
  using Error::Error;
};

/// Per linkage class the factor d_p with K_p(second) = d_p K_p(first). Throws
/// NonUniformScaling if the ratios inside a class differ by more than rel_tol.
std::vector<double> equilibrium_scaling_check(const BalancedForm& first,
                                              const BalancedForm& second,
                                              const ComplexGraph& g, double rel_tol = 1e-9);

/// Same check on bare vectors of balanced constants.
std::vector<double> kappa_scaling_factors(const Vector& first, const Vector& second,
                                          const ComplexGraph& g, double rel_tol = 1e-9);

}  // namespace crnkit

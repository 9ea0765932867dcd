#pragma once

// Gibbs free energy (RT = 1), chemical potentials, membership in the set of
// thermodynamic equilibria E, and the map chi sending an initial state to the
// equilibrium it converges to.

#include <cstddef>

#include "crnkit/kinetics.hpp"
#include "crnkit/linalg.hpp"
#include "crnkit/structure.hpp"

namespace crnkit {

struct ThermoState {
  Vector mu;     // Ln(x / x*)
  Vector gamma;  // Z^T mu, complex affinities
  double G = 0.0;
};

/// G(x) = x^T Ln(x / x*) + (x* - x)^T 1.
double gibbs_energy(const Vector& x_star, const Vector& x);

ThermoState gibbs(const BalancedForm& bf, const ComplexGraph& g, const Vector& x);

struct Dissipation {
  double rate = 0.0;            // mu^T xdot
  double laplacian_form = 0.0;  // -gamma^T B K B^T Exp(gamma)
  /// (gamma_P - gamma_S)(exp gamma_P - exp gamma_S) kappa_j >= 0 per reaction;
  /// rate = -sum(summands).
  Vector summands;
};

Dissipation gibbs_dissipation(const BalancedForm& bf, const ComplexGraph& g, const Vector& x);

struct MembershipReport {
  bool member = false;
  double stoichiometric_residual = 0.0;  // max |S^T Ln(x / x*)|
  bool dynamics_vanish = false;
  double dynamics_norm = 0.0;            // max |xdot|
  bool class_form = false;               // gamma constant on each linkage class
  double class_spread = 0.0;
};

MembershipReport is_equilibrium(const BalancedForm& bf, const ComplexGraph& g, const Vector& x,
                                double tol = 1e-9);

/// Orthonormal basis (columns) of ker S^T, from the exact moiety basis.
Matrix orthonormal_moiety_basis(const ComplexGraph& g);

struct ChiOptions {
  std::size_t max_iterations = 200;
  double rel_tol = 1e-12;  // on max |W^T (x1 - x0)| relative to max |x0|
};

struct ChiResult {
  Vector x1;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// The unique x1 in E with x1 - x0 in im S, found by damped Newton on
/// F(theta) = W^T (x* . Exp(W theta) - x0). Throws ConvergenceError if the
/// tolerance is not reached.
ChiResult chi_map(const BalancedForm& bf, const ComplexGraph& g, const Vector& x0,
                  const ChiOptions& options = {});

}  // namespace crnkit

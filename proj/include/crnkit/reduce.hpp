#pragma once

// Kron reduction: Schur complement of the balanced Laplacian B K B^T with
// respect to a set of removed complexes, and the reduced balanced network.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crnkit/kinetics.hpp"
#include "crnkit/linalg.hpp"
#include "crnkit/network.hpp"
#include "crnkit/structure.hpp"

namespace crnkit {

struct ReductionResult {
  std::vector<std::size_t> removed;   // complex indices of the full graph, sorted
  std::vector<std::size_t> retained;  // the complement, sorted
  std::vector<std::size_t> retained_species;  // full species index of each reduced species
  std::vector<std::size_t> dropped_species;   // species found only in removed complexes
  Matrix L_hat;      // L11 - L12 L22^{-1} L21 over the retained complexes
  IntMatrix Z_hat;   // retained columns of Z, rows of the retained species
  IntMatrix B_hat;   // one edge per retained pair with negative off-diagonal, tail < head
  Vector K_hat;      // negated off-diagonals of L_hat, one per edge
  ComplexGraph graph_hat;  // built from Z_hat and B_hat; complex i is retained[i]
  BalancedForm bf_hat;     // x* restricted to retained species, K_hat
  ReactionNetwork net_hat;
  double condition_number = 1.0;  // spectral condition of L22 (1 when nothing is removed)
  std::vector<std::string> warnings;
};

/// Throws InvalidArgument when `removed` has an out-of-range or repeated index
/// or contains every complex of some linkage class.
ReductionResult kron_reduce(const ReactionNetwork& net, const BalancedForm& bf,
                            const ComplexGraph& g, std::vector<std::size_t> removed);

/// Complexes of g that contain the species.
std::vector<std::size_t> complexes_containing(const ComplexGraph& g, std::size_t species);

/// Balanced mass action field of the reduced network; x ranges over the
/// retained species.
Vector reduced_dynamics(const ReductionResult& res, const Vector& x);

struct LaplacianProperties {
  double asymmetry = 0.0;        // max |L - L^T|
  double max_row_sum = 0.0;      // max |sum_j L_ij|
  double min_eigenvalue = 0.0;
  double max_off_diagonal = 0.0; // largest off-diagonal entry (should be <= 0)
  double norm = 0.0;             // max |L_ij|
  std::size_t kernel_dimension = 0;
  /// Checks at abs tolerance 1e-12 ||L|| (rows, symmetry, off-diagonals) and
  /// lambda_min >= -1e-10 ||L||.
  bool ok() const;
};

LaplacianProperties laplacian_properties(const Matrix& l);

struct ReductionDiagnosticsOptions {
  std::size_t equilibrium_samples = 20;
  std::uint64_t seed = 1;
  double horizon = 5.0;
  std::size_t output_points = 51;
  /// Initial state of the full network; empty selects a random state.
  Vector x0;
};

struct ReductionDiagnostics {
  /// Largest |S_hat^T Ln(x_hat / x_hat*)| over sampled members of E.
  double max_equilibrium_residual = 0.0;
  bool equilibria_included = false;  // residual <= 1e-9
  std::size_t full_deficiency = 0;
  std::size_t reduced_deficiency = 0;
  /// Full deficiency zero implies reduced deficiency zero; vacuous otherwise.
  bool zero_deficiency_inherited = true;
  double trajectory_max_error = 0.0;  // over retained species and output times
  double trajectory_l2_error = 0.0;   // sqrt of the trapezoidal integral of ||e||^2
};

ReductionDiagnostics reduction_diagnostics(const BalancedForm& bf, const ComplexGraph& g,
                                           const ReductionResult& res,
                                           const ReductionDiagnosticsOptions& options = {});

}  // namespace crnkit

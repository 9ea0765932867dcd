#pragma once

// Adaptive Dormand-Prince 5(4) integration of closed and open balanced
// networks, with Gibbs energy, moiety and passivity diagnostics recorded at
// every accepted step.

#include <cstddef>
#include <functional>
#include <vector>

#include "crnkit/equilibria.hpp"
#include "crnkit/kinetics.hpp"
#include "crnkit/linalg.hpp"
#include "crnkit/structure.hpp"

namespace crnkit {

using VectorField = std::function<Vector(double t, const Vector& x)>;

/// Boundary fluxes v_b(t), one entry per boundary species.
using BoundaryInput = std::function<Vector(double t)>;

/// Piecewise-constant boundary fluxes: values[k] applies on [starts[k], starts[k+1]).
struct PiecewiseConstantSchedule {
  std::vector<double> starts;
  std::vector<Vector> values;

  Vector operator()(double t) const;
  /// Interior switching times, strictly after `from`.
  std::vector<double> breakpoints(double from) const;
};

struct IntegrationOptions {
  double horizon = 10.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// Stop early once max|xdot| <= equilibrium_tol * max|x|. Near equilibrium
  /// the step size grows until stability limits it and |xdot|/|x| then hovers
  /// around rel_tol, so equilibrium_tol must sit well above rel_tol.
  bool to_equilibrium = false;
  double equilibrium_tol = 1e-6;
  double initial_step = 0.0;  // 0 selects a step from the initial derivative
  std::size_t max_steps = 2'000'000;
  /// Times the integrator lands on exactly; they are always recorded.
  std::vector<double> output_times;
  /// Discontinuities of the input; no step straddles one.
  std::vector<double> breakpoints;
  /// Record every accepted step, not only the output times and endpoints.
  bool record_steps = true;
};

class StepSizeCollapse : public Error {
 public:
  StepSizeCollapse(double t, double h);
};

struct StepRecord {
  double t = 0.0;
  Vector x;
  double step = 0.0;            // size of the step that reached t (0 at start)
  double error_estimate = 0.0;  // scaled error norm of that step
};

struct FieldIntegration {
  std::vector<StepRecord> records;
  bool reached_equilibrium = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t positivity_rejections = 0;
};

/// Integrates xdot = f(t, x) on [0, options.horizon] keeping x strictly
/// positive by step rejection. Throws StepSizeCollapse or Error on a
/// non-finite derivative.
FieldIntegration integrate_field(const VectorField& f, const Vector& x0,
                                 const IntegrationOptions& options);

/// Closed or open balanced dynamics
///   xdot = -Z B K B^T Exp(Z^T Ln(x / x*)) + S_b v_b(t).
class BalancedSystem {
 public:
  BalancedSystem(ComplexGraph graph, BalancedForm form);
  BalancedSystem(ComplexGraph graph, BalancedForm form, IntMatrix boundary, BoundaryInput input);

  const ComplexGraph& graph() const { return graph_; }
  const BalancedForm& form() const { return form_; }
  const Matrix& boundary() const { return boundary_; }
  bool is_open() const { return boundary_.cols() > 0; }
  Vector input(double t) const;

  Vector operator()(double t, const Vector& x) const;

 private:
  ComplexGraph graph_;
  BalancedForm form_;
  Matrix boundary_;
  BoundaryInput input_;
};

struct Diagnostics {
  double G = 0.0;
  Vector moieties;       // k x for every row k of the moiety basis
  double dGdt = 0.0;     // mu^T xdot, including boundary fluxes
  double step = 0.0;
  double error_estimate = 0.0;
  double dissipation = 0.0;  // gamma^T B K B^T Exp(gamma) >= 0
  Vector vb;                 // boundary fluxes (open systems)
  Vector mu_b;               // boundary potentials S_b^T mu (open systems)
  double supply = 0.0;       // mu_b^T v_b
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Diagnostics> diagnostics;
  MoietyBasis moieties;
  bool reached_equilibrium = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const Vector& final_state() const { return states.back(); }
  /// State recorded at exactly time t; throws InvalidArgument if absent.
  const Vector& state_at(double t) const;
};

Trajectory integrate(const BalancedSystem& system, const Vector& x0,
                     const IntegrationOptions& options = {});

/// mu_b = S_b^T Ln(x / x*).
Vector open_outputs(const BalancedForm& bf, const IntMatrix& boundary, const Vector& x);

struct InvariantReport {
  bool positive = true;
  bool gibbs_nonincreasing = true;
  double max_gibbs_increase = 0.0;  // largest G_{k+1} - G_k
  bool moieties_constant = true;
  double max_moiety_drift = 0.0;    // relative to ||x0||_1
  bool ok() const { return positive && gibbs_nonincreasing && moieties_constant; }
};

/// Checks a closed trajectory: strict positivity, G(x_{k+1}) <= G(x_k) +
/// gibbs_slack * max(1, |G(x_k)|), and |k x(t) - k x0| <= moiety_tol ||x0||_1.
InvariantReport check_invariants(const Trajectory& traj, double gibbs_slack = 1e-8,
                                 double moiety_tol = 1e-7);

struct PassivityReport {
  bool holds = true;
  double max_violation = 0.0;  // max over samples of dG/dt - mu_b^T v_b
  std::size_t worst_sample = 0;
  double min_dissipation = 0.0;
  /// Trapezoidal integral of (mu_b^T v_b - dG/dt) over the trajectory.
  double cumulative_margin = 0.0;
  bool cumulative_holds = true;
};

PassivityReport passivity_check(const Trajectory& traj, double slack = 1e-8,
                                double cumulative_slack = 1e-6);

}  // namespace crnkit

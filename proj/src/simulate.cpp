#include "crnkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crnkit/dsl.hpp"

namespace crnkit {

Vector PiecewiseConstantSchedule::operator()(double t) const {
  if (starts.empty() || starts.size() != values.size()) {
    throw InvalidArgument("schedule needs one value per start time");
  }
  auto it = std::upper_bound(starts.begin(), starts.end(), t);
  if (it == starts.begin()) return Vector::Zero(values.front().size());
  return values[static_cast<std::size_t>(it - starts.begin()) - 1];
}

std::vector<double> PiecewiseConstantSchedule::breakpoints(double from) const {
  std::vector<double> out;
  for (double s : starts) {
    if (s > from) out.push_back(s);
  }
  return out;
}

StepSizeCollapse::StepSizeCollapse(double t, double h)
    : Error("step size collapsed to " + format_double(h) + " at t = " + format_double(t)) {}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// Difference between the fifth- and fourth-order weights.
constexpr double kE[7] = {71.0 / 57600,     0.0,          -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

bool strictly_positive(const Vector& x) { return (x.array() > 0.0).all() && x.allFinite(); }

}  // namespace

FieldIntegration integrate_field(const VectorField& f, const Vector& x0,
                                 const IntegrationOptions& options) {
  if (!(options.rel_tol > 0.0) || !(options.abs_tol > 0.0)) {
    throw InvalidArgument("integration tolerances must be positive");
  }
  if (!(options.horizon > 0.0) || !std::isfinite(options.horizon)) {
    throw InvalidArgument("integration horizon must be positive and finite");
  }
  require_positive(x0);

  const double horizon = options.horizon;
  const double min_step = 1e-14 * horizon;

  std::vector<double> breaks;
  for (double b : options.breakpoints) {
    if (b > 0.0 && b < horizon) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> stops = breaks;
  for (double t : options.output_times) {
    if (t > 0.0 && t < horizon) stops.push_back(t);
  }
  stops.push_back(horizon);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  auto is_output = [&](double t) {
    return std::find(options.output_times.begin(), options.output_times.end(), t) !=
           options.output_times.end();
  };

  FieldIntegration out;
  double t = 0.0;
  Vector x = x0;
  std::size_t next_stop = 0;
  std::size_t next_break = 0;

  // Inputs are evaluated as left limits at the end of the current segment.
  auto eval = [&](double time, const Vector& state) -> Vector {
    double te = time;
    if (next_break < breaks.size() && te >= breaks[next_break]) {
      te = std::nextafter(breaks[next_break], -std::numeric_limits<double>::infinity());
    }
    Vector d = f(te, state);
    if (!d.allFinite()) throw Error("non-finite derivative at t = " + format_double(time));
    return d;
  };

  auto scaled_norm = [&](const Vector& err, const Vector& a, const Vector& b) {
    const Eigen::ArrayXd sc =
        options.abs_tol + options.rel_tol * a.array().abs().max(b.array().abs());
    return std::sqrt((err.array() / sc).square().mean());
  };

  Vector k[7];
  k[0] = eval(t, x);
  out.records.push_back({t, x, 0.0, 0.0});

  auto at_equilibrium = [&](const Vector& state, const Vector& deriv) {
    return deriv.cwiseAbs().maxCoeff() <= options.equilibrium_tol * state.cwiseAbs().maxCoeff();
  };
  if (options.to_equilibrium && at_equilibrium(x, k[0])) {
    out.reached_equilibrium = true;
    return out;
  }

  double h = options.initial_step;
  if (!(h > 0.0)) {
    const Eigen::ArrayXd sc = options.abs_tol + options.rel_tol * x.array().abs();
    const double d0 = std::sqrt((x.array() / sc).square().mean());
    const double d1 = std::sqrt((k[0].array() / sc).square().mean());
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  h = std::min(h, horizon);

  while (next_stop < stops.size()) {
    if (out.accepted_steps + out.rejected_steps >= options.max_steps) {
      throw Error("integration exceeded the maximum number of steps");
    }
    const double target = stops[next_stop];
    const double h_unclipped = h;
    bool lands = false;
    if (h >= target - t) {
      h = target - t;
      lands = true;
    }

    Vector y;
    bool positive = true;
    for (int s = 1; s < 7 && positive; ++s) {
      y = x;
      for (int j = 0; j < s; ++j) {
        if (kA[s][j] != 0.0) y.noalias() += (h * kA[s][j]) * k[j];
      }
      if (!strictly_positive(y)) {
        positive = false;
        break;
      }
      k[s] = eval(t + kC[s] * h, y);
    }
    if (!positive) {
      ++out.rejected_steps;
      ++out.positivity_rejections;
      h *= 0.5;
      if (h < min_step) throw StepSizeCollapse(t, h);
      continue;
    }

    Vector err = Vector::Zero(x.size());
    for (int j = 0; j < 7; ++j) {
      if (kE[j] != 0.0) err.noalias() += (h * kE[j]) * k[j];
    }
    const double en = scaled_norm(err, x, y);
    if (!std::isfinite(en)) throw Error("non-finite error estimate at t = " + format_double(t));
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);

    if (en > 1.0) {
      ++out.rejected_steps;
      h *= std::min(factor, 0.9);
      if (h < min_step) throw StepSizeCollapse(t, h);
      continue;
    }

    ++out.accepted_steps;
    const double step = h;
    t = lands ? target : t + h;
    x = y;
    k[0] = k[6];
    bool record = options.record_steps;
    if (lands) {
      record = record || is_output(t) || t == horizon;
      ++next_stop;
      if (next_break < breaks.size() && t == breaks[next_break]) {
        ++next_break;
        k[0] = eval(t, x);  // right limit after the switch
      }
    }
    const bool settled = options.to_equilibrium && at_equilibrium(x, k[0]);
    if (record || settled) out.records.push_back({t, x, step, en});
    if (settled) {
      out.reached_equilibrium = true;
      break;
    }
    h = lands ? std::max(step * factor, h_unclipped) : step * factor;
    if (next_stop < stops.size()) h = std::min(h, horizon);
  }
  return out;
}

BalancedSystem::BalancedSystem(ComplexGraph graph, BalancedForm form)
    : graph_(std::move(graph)),
      form_(std::move(form)),
      boundary_(Matrix::Zero(static_cast<Eigen::Index>(graph_.num_species()), 0)) {}

BalancedSystem::BalancedSystem(ComplexGraph graph, BalancedForm form, IntMatrix boundary,
                               BoundaryInput input)
    : graph_(std::move(graph)),
      form_(std::move(form)),
      boundary_(to_double(boundary)),
      input_(std::move(input)) {
  if (static_cast<std::size_t>(boundary_.rows()) != graph_.num_species()) {
    throw InvalidArgument("boundary matrix has the wrong number of rows");
  }
  if (boundary_.cols() > 0 && !input_) throw InvalidArgument("open system needs an input");
}

Vector BalancedSystem::input(double t) const {
  if (!is_open()) return Vector(0);
  Vector vb = input_(t);
  if (vb.size() != boundary_.cols()) {
    throw InvalidArgument("boundary input has length " + std::to_string(vb.size()) +
                          ", expected " + std::to_string(boundary_.cols()));
  }
  return vb;
}

Vector BalancedSystem::operator()(double t, const Vector& x) const {
  Vector xdot = balanced_dynamics(form_, graph_, x);
  if (is_open()) xdot.noalias() += boundary_ * input(t);
  return xdot;
}

const Vector& Trajectory::state_at(double t) const {
  auto it = std::find(times.begin(), times.end(), t);
  if (it == times.end()) throw InvalidArgument("no state recorded at t = " + format_double(t));
  return states[static_cast<std::size_t>(it - times.begin())];
}

Vector open_outputs(const BalancedForm& bf, const IntMatrix& boundary, const Vector& x) {
  if (x.size() != bf.x_star.size() || boundary.rows() != x.size()) {
    throw InvalidArgument("open_outputs: size mismatch");
  }
  require_positive(x);
  return to_double(boundary).transpose() * (x.array() / bf.x_star.array()).log().matrix();
}

Trajectory integrate(const BalancedSystem& system, const Vector& x0,
                     const IntegrationOptions& options) {
  if (static_cast<std::size_t>(x0.size()) != system.graph().num_species()) {
    throw InvalidArgument("initial state has the wrong length");
  }
  const FieldIntegration raw =
      integrate_field([&system](double t, const Vector& x) { return system(t, x); }, x0, options);

  Trajectory traj;
  traj.moieties = conserved_moieties(system.graph());
  const Matrix kmat = traj.moieties.as_matrix(system.graph().num_species());
  traj.reached_equilibrium = raw.reached_equilibrium;
  traj.accepted_steps = raw.accepted_steps;
  traj.rejected_steps = raw.rejected_steps;
  const auto& bf = system.form();
  const auto& g = system.graph();
  const Matrix z = to_double(g.Z);
  for (const auto& rec : raw.records) {
    Diagnostics d;
    const ThermoState st = gibbs(bf, g, rec.x);
    d.G = st.G;
    d.moieties = kmat * rec.x;
    d.step = rec.step;
    d.error_estimate = rec.error_estimate;
    const Vector activity = st.gamma.array().exp().matrix();
    d.dissipation = st.gamma.dot(bf.laplacian * activity);
    Vector xdot = -(z * (bf.laplacian * activity));
    if (system.is_open()) {
      d.vb = system.input(rec.t);
      d.mu_b = system.boundary().transpose() * st.mu;
      d.supply = d.mu_b.dot(d.vb);
      xdot.noalias() += system.boundary() * d.vb;
    }
    d.dGdt = st.mu.dot(xdot);
    traj.times.push_back(rec.t);
    traj.states.push_back(rec.x);
    traj.diagnostics.push_back(std::move(d));
  }
  return traj;
}

InvariantReport check_invariants(const Trajectory& traj, double gibbs_slack, double moiety_tol) {
  InvariantReport rep;
  if (traj.states.empty()) return rep;
  const double mass = traj.states.front().cwiseAbs().sum();
  const Vector& m0 = traj.diagnostics.front().moieties;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (!strictly_positive(traj.states[k])) rep.positive = false;
    if (m0.size() > 0) {
      const double drift = (traj.diagnostics[k].moieties - m0).cwiseAbs().maxCoeff() / mass;
      rep.max_moiety_drift = std::max(rep.max_moiety_drift, drift);
    }
    if (k > 0) {
      const double prev = traj.diagnostics[k - 1].G;
      const double inc = traj.diagnostics[k].G - prev;
      rep.max_gibbs_increase = std::max(rep.max_gibbs_increase, inc);
      if (inc > gibbs_slack * std::max(1.0, std::abs(prev))) rep.gibbs_nonincreasing = false;
    }
  }
  rep.moieties_constant = rep.max_moiety_drift <= moiety_tol;
  return rep;
}

PassivityReport passivity_check(const Trajectory& traj, double slack, double cumulative_slack) {
  PassivityReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  rep.min_dissipation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
    const auto& d = traj.diagnostics[k];
    const double violation = d.dGdt - d.supply;
    if (violation > rep.max_violation) {
      rep.max_violation = violation;
      rep.worst_sample = k;
    }
    rep.min_dissipation = std::min(rep.min_dissipation, d.dissipation);
    if (k > 0) {
      const auto& p = traj.diagnostics[k - 1];
      const double dt = traj.times[k] - traj.times[k - 1];
      rep.cumulative_margin += 0.5 * dt * ((p.supply - p.dGdt) + (d.supply - d.dGdt));
    }
  }
  rep.holds = rep.max_violation <= slack;
  rep.cumulative_holds = rep.cumulative_margin >= -cumulative_slack;
  return rep;
}

}  // namespace crnkit

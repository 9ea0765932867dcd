#include "crnkit/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "crnkit/rational.hpp"

namespace crnkit {

double gibbs_energy(const Vector& x_star, const Vector& x) {
  if (x.size() != x_star.size()) throw InvalidArgument("gibbs: length mismatch");
  require_positive(x);
  return (x.array() * (x.array() / x_star.array()).log() + x_star.array() - x.array()).sum();
}

ThermoState gibbs(const BalancedForm& bf, const ComplexGraph& g, const Vector& x) {
  ThermoState st;
  st.G = gibbs_energy(bf.x_star, x);
  st.mu = (x.array() / bf.x_star.array()).log().matrix();
  st.gamma = to_double(g.Z).transpose() * st.mu;
  return st;
}

Dissipation gibbs_dissipation(const BalancedForm& bf, const ComplexGraph& g, const Vector& x) {
  const ThermoState st = gibbs(bf, g, x);
  const Vector activity = st.gamma.array().exp().matrix();
  Dissipation d;
  d.rate = st.mu.dot(balanced_dynamics(bf, g, x));
  d.laplacian_form = -st.gamma.dot(bf.laplacian * activity);
  d.summands.resize(static_cast<Eigen::Index>(g.num_reactions()));
  for (std::size_t j = 0; j < g.num_reactions(); ++j) {
    const auto s = static_cast<Eigen::Index>(g.substrate[j]);
    const auto p = static_cast<Eigen::Index>(g.product[j]);
    d.summands[static_cast<Eigen::Index>(j)] =
        (st.gamma[p] - st.gamma[s]) * (activity[p] - activity[s]) *
        bf.kappa[static_cast<Eigen::Index>(j)];
  }
  return d;
}

MembershipReport is_equilibrium(const BalancedForm& bf, const ComplexGraph& g, const Vector& x,
                                double tol) {
  MembershipReport rep;
  const ThermoState st = gibbs(bf, g, x);
  const Vector affinity = to_double(g.B).transpose() * st.gamma;  // S^T mu
  rep.stoichiometric_residual = affinity.size() ? affinity.cwiseAbs().maxCoeff() : 0.0;

  const Vector xdot = balanced_dynamics(bf, g, x);
  rep.dynamics_norm = xdot.size() ? xdot.cwiseAbs().maxCoeff() : 0.0;
  const Vector activity = st.gamma.array().exp().matrix();
  const Vector scale = to_double(g.Z) * (bf.laplacian.cwiseAbs() * activity);
  const double dyn_scale = scale.size() ? scale.maxCoeff() : 0.0;
  rep.dynamics_vanish = rep.dynamics_norm <= tol * std::max(1.0, dyn_scale);

  double max_gamma = 1.0;
  for (const auto& cls : g.linkage_classes) {
    double lo = st.gamma[static_cast<Eigen::Index>(cls.front())];
    double hi = lo;
    for (auto rho : cls) {
      const double v = st.gamma[static_cast<Eigen::Index>(rho)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      max_gamma = std::max(max_gamma, std::abs(v));
    }
    rep.class_spread = std::max(rep.class_spread, hi - lo);
  }
  rep.class_form = rep.class_spread <= tol * max_gamma;
  rep.member = rep.stoichiometric_residual <= tol && rep.dynamics_vanish && rep.class_form;
  return rep;
}

Matrix orthonormal_moiety_basis(const ComplexGraph& g) {
  const auto m = static_cast<Eigen::Index>(g.num_species());
  const auto rows = exact::left_kernel(g.stoichiometric_matrix());
  if (rows.empty()) return Matrix(m, 0);
  Matrix k(m, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    k.col(static_cast<Eigen::Index>(i)) = rows[i].cast<double>();
  }
  Eigen::HouseholderQR<Matrix> qr(k);
  return qr.householderQ() * Matrix::Identity(m, k.cols());
}

ChiResult chi_map(const BalancedForm& bf, const ComplexGraph& g, const Vector& x0,
                  const ChiOptions& options) {
  if (static_cast<std::size_t>(x0.size()) != g.num_species()) {
    throw InvalidArgument("chi_map: x0 has the wrong length");
  }
  require_positive(x0);
  const Matrix w = orthonormal_moiety_basis(g);
  ChiResult out;
  if (w.cols() == 0) {
    out.x1 = bf.x_star;
    return out;
  }
  const double tol = options.rel_tol * x0.cwiseAbs().maxCoeff();
  const Vector target = w.transpose() * x0;

  auto state = [&](const Vector& theta) -> Vector {
    return (bf.x_star.array() * (w * theta).array().exp()).matrix();
  };
  auto finite = [](const Vector& v) { return v.allFinite(); };

  Vector theta = Vector::Zero(w.cols());
  Vector x = state(theta);
  Vector f = w.transpose() * x - target;
  for (std::size_t it = 0;; ++it) {
    out.iterations = it;
    out.residual = f.cwiseAbs().maxCoeff();
    if (out.residual <= tol) break;
    if (it == options.max_iterations) {
      throw ConvergenceError("chi_map: Newton iteration limit reached", out.residual);
    }
    const Matrix jac = w.transpose() * x.asDiagonal() * w;
    const Vector step = -jac.ldlt().solve(f);
    const double norm = f.norm();
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings, t *= 0.5) {
      const Vector theta_trial = theta + t * step;
      const Vector x_trial = state(theta_trial);
      if (!finite(x_trial)) continue;
      const Vector f_trial = w.transpose() * x_trial - target;
      if (f_trial.norm() < norm) {
        theta = theta_trial;
        x = x_trial;
        f = f_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("chi_map: line search failed to reduce the residual", out.residual);
    }
  }
  out.x1 = x;
  return out;
}

}  // namespace crnkit

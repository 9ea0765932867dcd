#include "crnkit/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "crnkit/equilibria.hpp"
#include "crnkit/rational.hpp"
#include "crnkit/simulate.hpp"

namespace crnkit {
namespace {

Matrix select(const Matrix& m, const std::vector<std::size_t>& rows,
              const std::vector<std::size_t>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

Vector restrict(const Vector& x, const std::vector<std::size_t>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(idx[i])];
  }
  return out;
}

}  // namespace

std::vector<std::size_t> complexes_containing(const ComplexGraph& g, std::size_t species) {
  std::vector<std::size_t> out;
  for (Eigen::Index rho = 0; rho < g.Z.cols(); ++rho) {
    if (g.Z(static_cast<Eigen::Index>(species), rho) != 0) {
      out.push_back(static_cast<std::size_t>(rho));
    }
  }
  return out;
}

ReductionResult kron_reduce(const ReactionNetwork& net, const BalancedForm& bf,
                            const ComplexGraph& g, std::vector<std::size_t> removed) {
  const std::size_t c = g.num_complexes();
  std::sort(removed.begin(), removed.end());
  if (std::adjacent_find(removed.begin(), removed.end()) != removed.end()) {
    throw InvalidArgument("a complex is listed twice for removal");
  }
  if (!removed.empty() && removed.back() >= c) {
    throw InvalidArgument("complex index " + std::to_string(removed.back()) + " out of range");
  }
  std::vector<bool> is_removed(c, false);
  for (auto rho : removed) is_removed[rho] = true;
  for (std::size_t p = 0; p < g.num_classes(); ++p) {
    const auto& cls = g.linkage_classes[p];
    if (std::all_of(cls.begin(), cls.end(), [&](std::size_t rho) { return is_removed[rho]; })) {
      throw InvalidArgument("removal would delete linkage class " + std::to_string(p) +
                            " entirely");
    }
  }

  ReductionResult res;
  res.removed = removed;
  for (std::size_t rho = 0; rho < c; ++rho) {
    if (!is_removed[rho]) res.retained.push_back(rho);
  }

  const Matrix& l = bf.laplacian;
  const Matrix l11 = select(l, res.retained, res.retained);
  if (removed.empty()) {
    res.L_hat = l11;
  } else {
    const Matrix l12 = select(l, res.retained, removed);
    const Matrix l22 = select(l, removed, removed);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(l22, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) throw Error("Kron reduction: L22 is singular");
    res.condition_number = hi / lo;
    const Eigen::LDLT<Matrix> ldlt(l22);
    res.L_hat = l11 - l12 * ldlt.solve(l12.transpose());
    res.L_hat = 0.5 * (res.L_hat + res.L_hat.transpose());
  }

  // Species kept: those present in some retained complex, or in no complex.
  const std::size_t m = g.num_species();
  for (std::size_t s = 0; s < m; ++s) {
    bool in_retained = false;
    bool in_any = false;
    for (std::size_t rho = 0; rho < c; ++rho) {
      if (g.Z(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(rho)) == 0) continue;
      in_any = true;
      in_retained = in_retained || !is_removed[rho];
    }
    if (in_retained || !in_any) {
      res.retained_species.push_back(s);
    } else {
      res.dropped_species.push_back(s);
    }
  }
  for (const auto& b : net.boundary) {
    for (auto rho : removed) {
      if (g.Z(static_cast<Eigen::Index>(b.species), static_cast<Eigen::Index>(rho)) != 0) {
        res.warnings.push_back("removed complex " + net.complex_label(g.complexes[rho]) +
                               " contains boundary species " + net.species[b.species]);
      }
    }
  }

  const auto ch = static_cast<Eigen::Index>(res.retained.size());
  const auto mh = static_cast<Eigen::Index>(res.retained_species.size());
  res.Z_hat.resize(mh, ch);
  for (Eigen::Index i = 0; i < mh; ++i) {
    for (Eigen::Index rho = 0; rho < ch; ++rho) {
      res.Z_hat(i, rho) = g.Z(static_cast<Eigen::Index>(res.retained_species[static_cast<std::size_t>(i)]),
                              static_cast<Eigen::Index>(res.retained[static_cast<std::size_t>(rho)]));
    }
  }

  const double tol = 1e-12 * std::max(1.0, l.cwiseAbs().maxCoeff());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  std::vector<double> weights;
  for (Eigen::Index i = 0; i < ch; ++i) {
    for (Eigen::Index j = i + 1; j < ch; ++j) {
      if (res.L_hat(i, j) < -tol) {
        edges.emplace_back(i, j);
        weights.push_back(-res.L_hat(i, j));
      }
    }
  }
  const auto rh = static_cast<Eigen::Index>(edges.size());
  res.B_hat = IntMatrix::Zero(ch, rh);
  res.K_hat.resize(rh);
  for (Eigen::Index e = 0; e < rh; ++e) {
    res.B_hat(edges[static_cast<std::size_t>(e)].first, e) = -1;
    res.B_hat(edges[static_cast<std::size_t>(e)].second, e) = 1;
    res.K_hat[e] = weights[static_cast<std::size_t>(e)];
  }
  res.graph_hat = complex_graph_from_matrices(res.Z_hat, res.B_hat);
  const Vector x_star_hat = restrict(bf.x_star, res.retained_species);
  res.bf_hat = make_balanced_form(res.graph_hat, x_star_hat, res.K_hat);

  // Reduced network: species renumbered, rate constants from kappa_hat and x*.
  std::vector<std::size_t> new_index(m, 0);
  for (std::size_t i = 0; i < res.retained_species.size(); ++i) {
    new_index[res.retained_species[i]] = i;
    res.net_hat.species.push_back(net.species[res.retained_species[i]]);
  }
  const Vector log_act = to_double(res.Z_hat).transpose() * x_star_hat.array().log().matrix();
  for (Eigen::Index e = 0; e < rh; ++e) {
    const auto [tail, head] = edges[static_cast<std::size_t>(e)];
    auto terms = [&](Eigen::Index rho) {
      ComplexTerms out;
      for (const auto& t : g.complexes[res.retained[static_cast<std::size_t>(rho)]]) {
        out.push_back({new_index[t.species], t.coefficient});
      }
      return canonical_complex(std::move(out));
    };
    Reaction rx;
    rx.substrate = terms(tail);
    rx.product = terms(head);
    rx.k_forw = res.K_hat[e] / std::exp(log_act[tail]);
    rx.k_rev = res.K_hat[e] / std::exp(log_act[head]);
    res.net_hat.reactions.push_back(std::move(rx));
  }
  for (const auto& b : net.boundary) {
    if (std::find(res.dropped_species.begin(), res.dropped_species.end(), b.species) ==
        res.dropped_species.end()) {
      res.net_hat.boundary.push_back({new_index[b.species], b.direction});
    }
  }
  if (net.equilibrium) res.net_hat.equilibrium = restrict(*net.equilibrium, res.retained_species);
  res.net_hat.validate();
  return res;
}

Vector reduced_dynamics(const ReductionResult& res, const Vector& x) {
  return balanced_dynamics(res.bf_hat, res.graph_hat, x);
}

bool LaplacianProperties::ok() const {
  const double tol = 1e-12 * std::max(1.0, norm);
  return asymmetry <= tol && max_row_sum <= tol && max_off_diagonal <= tol &&
         min_eigenvalue >= -1e-10 * std::max(1.0, norm);
}

LaplacianProperties laplacian_properties(const Matrix& l) {
  LaplacianProperties p;
  if (l.size() == 0) return p;
  p.norm = l.cwiseAbs().maxCoeff();
  p.asymmetry = (l - l.transpose()).cwiseAbs().maxCoeff();
  p.max_row_sum = l.rowwise().sum().cwiseAbs().maxCoeff();
  p.max_off_diagonal = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      if (i != j) p.max_off_diagonal = std::max(p.max_off_diagonal, l(i, j));
    }
  }
  if (l.rows() == 1) p.max_off_diagonal = 0.0;
  const Matrix sym = 0.5 * (l + l.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  p.min_eigenvalue = eig.eigenvalues().minCoeff();
  const double ktol = 1e-9 * std::max(1.0, p.norm);
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (std::abs(eig.eigenvalues()[i]) <= ktol) ++p.kernel_dimension;
  }
  return p;
}

ReductionDiagnostics reduction_diagnostics(const BalancedForm& bf, const ComplexGraph& g,
                                           const ReductionResult& res,
                                           const ReductionDiagnosticsOptions& options) {
  ReductionDiagnostics d;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Members of E are x* Exp(W theta) with W spanning ker S^T.
  const Matrix w = orthonormal_moiety_basis(g);
  const Matrix s_hat_t = to_double(res.graph_hat.stoichiometric_matrix()).transpose();
  for (std::size_t k = 0; k < options.equilibrium_samples; ++k) {
    Vector theta(w.cols());
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = normal(rng);
    const Vector x = (bf.x_star.array() * (w * theta).array().exp()).matrix();
    const Vector mu_hat =
        (restrict(x, res.retained_species).array() / res.bf_hat.x_star.array()).log().matrix();
    if (s_hat_t.size() > 0) {
      d.max_equilibrium_residual =
          std::max(d.max_equilibrium_residual, (s_hat_t * mu_hat).cwiseAbs().maxCoeff());
    }
  }
  d.equilibria_included = d.max_equilibrium_residual <= 1e-9;

  d.full_deficiency = deficiency(g).deficiency;
  d.reduced_deficiency = deficiency(res.graph_hat).deficiency;
  d.zero_deficiency_inherited = d.full_deficiency != 0 || d.reduced_deficiency == 0;

  Vector x0 = options.x0;
  if (x0.size() == 0) {
    std::uniform_real_distribution<double> log_unif(std::log(0.2), std::log(5.0));
    x0.resize(static_cast<Eigen::Index>(g.num_species()));
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
      x0[i] = bf.x_star[i] * std::exp(log_unif(rng));
    }
  }
  IntegrationOptions opts;
  opts.horizon = options.horizon;
  opts.record_steps = false;
  const std::size_t n = std::max<std::size_t>(options.output_points, 2);
  for (std::size_t k = 0; k < n; ++k) {
    opts.output_times.push_back(options.horizon * static_cast<double>(k) /
                                static_cast<double>(n - 1));
  }
  const Trajectory full = integrate(BalancedSystem(g, bf), x0, opts);
  const Trajectory reduced = integrate(BalancedSystem(res.graph_hat, res.bf_hat),
                                       restrict(x0, res.retained_species), opts);
  double integral = 0.0;
  double prev_t = 0.0;
  double prev_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = opts.output_times[k];
    const Vector e = restrict(full.state_at(t), res.retained_species) - reduced.state_at(t);
    const double sq = e.squaredNorm();
    d.trajectory_max_error = std::max(d.trajectory_max_error, e.lpNorm<Eigen::Infinity>());
    if (k > 0) integral += 0.5 * (t - prev_t) * (sq + prev_sq);
    prev_t = t;
    prev_sq = sq;
  }
  d.trajectory_l2_error = std::sqrt(integral);
  return d;
}

}  // namespace crnkit

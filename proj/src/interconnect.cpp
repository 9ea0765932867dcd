#include "crnkit/interconnect.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "crnkit/rational.hpp"

namespace crnkit {
namespace {

constexpr std::size_t kMaxPartitionSearch = 20;

struct Pairing {
  std::vector<std::size_t> first;   // net1 species index of each shared pair
  std::vector<std::size_t> second;  // net2 species index of each shared pair
};

bool is_boundary(const ReactionNetwork& net, std::size_t s) {
  for (const auto& b : net.boundary) {
    if (b.species == s) return true;
  }
  return false;
}

Pairing resolve_pairs(const ReactionNetwork& net1, const ReactionNetwork& net2,
                      const InterconnectionSpec& spec) {
  Pairing out;
  std::set<std::size_t> seen1;
  std::set<std::size_t> seen2;
  for (const auto& [a, b] : spec.pairs) {
    const auto i = net1.find_species(a);
    const auto j = net2.find_species(b);
    if (!i) throw InvalidArgument("first network has no species '" + a + "'");
    if (!j) throw InvalidArgument("second network has no species '" + b + "'");
    if (!is_boundary(net1, *i)) {
      throw InvalidArgument("'" + a + "' is not a boundary species of the first network");
    }
    if (!is_boundary(net2, *j)) {
      throw InvalidArgument("'" + b + "' is not a boundary species of the second network");
    }
    if (!seen1.insert(*i).second) throw InvalidArgument("'" + a + "' is paired twice");
    if (!seen2.insert(*j).second) throw InvalidArgument("'" + b + "' is paired twice");
    out.first.push_back(*i);
    out.second.push_back(*j);
  }
  return out;
}

ComplexTerms remap(const ComplexTerms& terms, const std::vector<std::size_t>& map) {
  ComplexTerms out;
  for (const auto& t : terms) out.push_back({map[t.species], t.coefficient});
  return canonical_complex(std::move(out));
}

// Rows of Z placed at the composite species indices.
IntMatrix lift_rows(const IntMatrix& z, const std::vector<std::size_t>& map, std::size_t m) {
  IntMatrix out = IntMatrix::Zero(static_cast<Eigen::Index>(m), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    out.row(static_cast<Eigen::Index>(map[static_cast<std::size_t>(i)])) = z.row(i);
  }
  return out;
}

Vector restrict(const Vector& x, const std::vector<std::size_t>& map) {
  Vector out(static_cast<Eigen::Index>(map.size()));
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(map[i])];
  }
  return out;
}

// Transposed stoichiometric matrix of a constituent, split into the columns of
// its internal species and of its shared species.
struct SplitTranspose {
  IntMatrix internal;
  IntMatrix shared;
};

SplitTranspose split_transpose(const ComplexGraph& g, const std::vector<std::size_t>& shared) {
  const IntMatrix st = g.stoichiometric_matrix().transpose();
  std::vector<bool> is_shared(g.num_species(), false);
  for (auto s : shared) is_shared[s] = true;
  SplitTranspose out;
  out.internal.resize(st.rows(), static_cast<Eigen::Index>(g.num_species() - shared.size()));
  out.shared.resize(st.rows(), static_cast<Eigen::Index>(shared.size()));
  Eigen::Index col = 0;
  for (std::size_t s = 0; s < g.num_species(); ++s) {
    if (!is_shared[s]) out.internal.col(col++) = st.col(static_cast<Eigen::Index>(s));
  }
  for (std::size_t k = 0; k < shared.size(); ++k) {
    out.shared.col(static_cast<Eigen::Index>(k)) = st.col(static_cast<Eigen::Index>(shared[k]));
  }
  return out;
}

std::vector<bool> columns_in_image(const SplitTranspose& split) {
  std::vector<bool> out;
  for (Eigen::Index k = 0; k < split.shared.cols(); ++k) {
    const IntVector v = split.shared.col(k);
    out.push_back(split.internal.cols() > 0 ? exact::in_column_space(split.internal, v)
                                            : v.isZero());
  }
  return out;
}

}  // namespace

Interconnection interconnect(const ReactionNetwork& net1, const ReactionNetwork& net2,
                             const InterconnectionSpec& spec) {
  net1.validate();
  net2.validate();
  const Pairing pairing = resolve_pairs(net1, net2, spec);

  std::vector<bool> shared1(net1.num_species(), false);
  std::vector<bool> shared2(net2.num_species(), false);
  for (auto i : pairing.first) shared1[i] = true;
  for (auto j : pairing.second) shared2[j] = true;

  Interconnection out;
  out.species_of_first.assign(net1.num_species(), 0);
  out.species_of_second.assign(net2.num_species(), 0);
  std::vector<std::string> names;
  std::vector<int> origin;  // 1 or 2 for internal species, 0 for shared
  for (std::size_t i = 0; i < net1.num_species(); ++i) {
    if (shared1[i]) continue;
    out.species_of_first[i] = names.size();
    names.push_back(net1.species[i]);
    origin.push_back(1);
  }
  out.num_internal_first = names.size();
  for (std::size_t k = 0; k < pairing.first.size(); ++k) {
    out.species_of_first[pairing.first[k]] = names.size();
    out.species_of_second[pairing.second[k]] = names.size();
    names.push_back(net1.species[pairing.first[k]]);
    origin.push_back(0);
  }
  out.num_shared = pairing.first.size();
  for (std::size_t j = 0; j < net2.num_species(); ++j) {
    if (shared2[j]) continue;
    out.species_of_second[j] = names.size();
    names.push_back(net2.species[j]);
    origin.push_back(2);
  }
  out.num_internal_second = names.size() - out.num_internal_first - out.num_shared;

  std::map<std::string, int> count;
  for (const auto& n : names) ++count[n];
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (count[names[i]] < 2 || origin[i] == 0) continue;
    const std::string renamed = (origin[i] == 1 ? "n1." : "n2.") + names[i];
    out.renamed.push_back(names[i] + " -> " + renamed);
    names[i] = renamed;
  }
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size()) {
    throw InvalidArgument("species names of the composite still collide after prefixing");
  }

  ReactionNetwork& net = out.network;
  net.species = names;
  for (const auto& rx : net1.reactions) {
    net.reactions.push_back({remap(rx.substrate, out.species_of_first),
                             remap(rx.product, out.species_of_first), rx.k_forw, rx.k_rev});
  }
  for (const auto& rx : net2.reactions) {
    net.reactions.push_back({remap(rx.substrate, out.species_of_second),
                             remap(rx.product, out.species_of_second), rx.k_forw, rx.k_rev});
  }
  for (const auto& b : net1.boundary) {
    if (!shared1[b.species]) net.boundary.push_back({out.species_of_first[b.species], b.direction});
  }
  for (const auto& b : net2.boundary) {
    if (!shared2[b.species]) {
      net.boundary.push_back({out.species_of_second[b.species], b.direction});
    }
  }
  if (net2.num_species() == 0 && net1.equilibrium) {
    net.equilibrium = net1.equilibrium;
  } else if (net1.num_species() == 0 && net2.equilibrium) {
    net.equilibrium = net2.equilibrium;
  } else if (net1.equilibrium && net2.equilibrium) {
    Vector eq(static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < net1.num_species(); ++i) {
      eq[static_cast<Eigen::Index>(out.species_of_first[i])] =
          (*net1.equilibrium)[static_cast<Eigen::Index>(i)];
    }
    bool consistent = true;
    for (std::size_t j = 0; j < net2.num_species(); ++j) {
      const auto idx = static_cast<Eigen::Index>(out.species_of_second[j]);
      const double v = (*net2.equilibrium)[static_cast<Eigen::Index>(j)];
      if (shared2[j] && eq[idx] != v) consistent = false;
      eq[idx] = v;
    }
    if (consistent) net.equilibrium = eq;
  }
  net.validate();
  out.reactions_of_first = net1.num_reactions();

  if (spec.identify_shared_complexes) {
    out.graph = build_complex_graph(net);
    out.complexes_of_first = build_complex_graph(net1).num_complexes();
    return out;
  }
  const ComplexGraph g1 = build_complex_graph(net1);
  const ComplexGraph g2 = build_complex_graph(net2);
  const std::size_t m = names.size();
  const auto c1 = static_cast<Eigen::Index>(g1.num_complexes());
  const auto c2 = static_cast<Eigen::Index>(g2.num_complexes());
  IntMatrix z(static_cast<Eigen::Index>(m), c1 + c2);
  z << lift_rows(g1.Z, out.species_of_first, m), lift_rows(g2.Z, out.species_of_second, m);
  IntMatrix b = IntMatrix::Zero(c1 + c2, g1.B.cols() + g2.B.cols());
  b.topLeftCorner(c1, g1.B.cols()) = g1.B;
  b.bottomRightCorner(c2, g2.B.cols()) = g2.B;
  out.graph = complex_graph_from_matrices(std::move(z), std::move(b));
  out.complexes_of_first = static_cast<std::size_t>(c1);
  return out;
}

CompositeBalance composite_balanced(const ReactionNetwork& net1, const BalancedForm& bf1,
                                    const ReactionNetwork& net2, const BalancedForm& bf2,
                                    const InterconnectionSpec& spec) {
  CompositeBalance out;
  out.composite = interconnect(net1, net2, spec);
  out.balance = find_thermodynamic_equilibrium(out.composite.network, out.composite.graph);

  const Pairing pairing = resolve_pairs(net1, net2, spec);
  const ComplexGraph g1 = build_complex_graph(net1);
  const ComplexGraph g2 = build_complex_graph(net2);
  out.column_in_image_first = columns_in_image(split_transpose(g1, pairing.first));
  out.column_in_image_second = columns_in_image(split_transpose(g2, pairing.second));

  const std::size_t b = pairing.first.size();
  if (b <= kMaxPartitionSearch) {
    out.partition_condition = false;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << b); ++mask) {
      bool ok = true;
      for (std::size_t i = 0; i < b && ok; ++i) {
        ok = (mask >> i) & 1U ? out.column_in_image_first[i] : out.column_in_image_second[i];
      }
      if (!ok) continue;
      out.partition_condition = true;
      for (std::size_t i = 0; i < b; ++i) {
        if ((mask >> i) & 1U) out.partition_first.push_back(i);
      }
      break;
    }
  }

  if (out.balance.balanced()) {
    const Vector& kappa = out.balance.form->kappa;
    const auto r1 = static_cast<Eigen::Index>(net1.num_reactions());
    const auto r2 = static_cast<Eigen::Index>(net2.num_reactions());
    out.scaling_first = kappa_scaling_factors(bf1.kappa, kappa.head(r1), g1);
    out.scaling_second = kappa_scaling_factors(bf2.kappa, kappa.tail(r2), g2);
  }
  return out;
}

PortEquivalenceReport port_interconnection_equivalence_test(const ReactionNetwork& net1,
                                                            const ReactionNetwork& net2,
                                                            const InterconnectionSpec& spec,
                                                            std::size_t samples,
                                                            std::uint64_t seed) {
  const Interconnection comp = interconnect(net1, net2, spec);
  const BalanceResult balance = find_thermodynamic_equilibrium(comp.network, comp.graph);
  if (!balance.balanced()) {
    throw InvalidArgument("port equivalence needs a balanced composite network");
  }
  const BalancedForm& bf = *balance.form;
  const Pairing pairing = resolve_pairs(net1, net2, spec);

  // Each constituent in balanced form around the composite equilibrium.
  const ComplexGraph g1 = build_complex_graph(net1);
  const ComplexGraph g2 = build_complex_graph(net2);
  const BalancedForm bf1 =
      verify_declared_equilibrium(net1, g1, restrict(bf.x_star, comp.species_of_first));
  const BalancedForm bf2 =
      verify_declared_equilibrium(net2, g2, restrict(bf.x_star, comp.species_of_second));

  const auto m = static_cast<Eigen::Index>(comp.network.num_species());
  const std::size_t b = pairing.first.size();
  struct Fields {
    Vector composite;
    Vector port;
    double power = 0.0;
  };
  auto evaluate = [&](const Vector& x) {
    Fields f;
    f.composite = balanced_dynamics(bf, comp.graph, x);
    const Vector f1 = balanced_dynamics(bf1, g1, restrict(x, comp.species_of_first));
    const Vector f2 = balanced_dynamics(bf2, g2, restrict(x, comp.species_of_second));
    f.port = Vector::Zero(m);
    for (std::size_t i = 0; i < net1.num_species(); ++i) {
      f.port[static_cast<Eigen::Index>(comp.species_of_first[i])] += f1[static_cast<Eigen::Index>(i)];
    }
    // net2 stores nothing at the shared species: its port flux cancels its own
    // production there, and net1 receives the opposite flux.
    Vector vb1(static_cast<Eigen::Index>(b));
    Vector vb2(static_cast<Eigen::Index>(b));
    Vector mu1(static_cast<Eigen::Index>(b));
    Vector mu2(static_cast<Eigen::Index>(b));
    for (std::size_t k = 0; k < b; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const auto i1 = static_cast<Eigen::Index>(pairing.first[k]);
      const auto i2 = static_cast<Eigen::Index>(pairing.second[k]);
      vb2[kk] = -f2[i2];
      vb1[kk] = -vb2[kk];
      mu1[kk] = std::log(x[static_cast<Eigen::Index>(comp.species_of_first[pairing.first[k]])] /
                         bf1.x_star[i1]);
      mu2[kk] = std::log(x[static_cast<Eigen::Index>(comp.species_of_second[pairing.second[k]])] /
                         bf2.x_star[i2]);
      f.port[static_cast<Eigen::Index>(comp.species_of_first[pairing.first[k]])] += vb1[kk];
    }
    for (std::size_t j = 0; j < net2.num_species(); ++j) {
      bool shared = false;
      for (auto s : pairing.second) shared = shared || s == j;
      if (!shared) {
        f.port[static_cast<Eigen::Index>(comp.species_of_second[j])] +=
            f2[static_cast<Eigen::Index>(j)];
      }
    }
    f.power = mu1.dot(vb1) + mu2.dot(vb2);
    return f;
  };

  PortEquivalenceReport rep;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_unif(std::log(0.1), std::log(10.0));
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x(m);
    for (Eigen::Index i = 0; i < m; ++i) x[i] = std::exp(log_unif(rng));
    const Fields f = evaluate(x);
    const double scale = std::max(1.0, f.composite.lpNorm<Eigen::Infinity>());
    rep.max_discrepancy =
        std::max(rep.max_discrepancy, (f.composite - f.port).lpNorm<Eigen::Infinity>() / scale);
    rep.max_power_residual = std::max(rep.max_power_residual, std::abs(f.power));
  }
  const Fields at_eq = evaluate(bf.x_star);
  rep.equilibrium_field_norm = std::max(at_eq.composite.lpNorm<Eigen::Infinity>(),
                                        at_eq.port.lpNorm<Eigen::Infinity>());
  return rep;
}

}  // namespace crnkit

#include "crnkit/structure.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "crnkit/rational.hpp"

namespace crnkit {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

void assign_classes(ComplexGraph& g) {
  g.linkage_classes = linkage_classes(g);
  g.class_of.assign(g.num_complexes(), 0);
  for (std::size_t p = 0; p < g.linkage_classes.size(); ++p) {
    for (auto rho : g.linkage_classes[p]) g.class_of[rho] = p;
  }
}

}  // namespace

std::vector<std::size_t> ComplexGraph::class_reactions(std::size_t p) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < num_reactions(); ++j) {
    if (class_of[substrate[j]] == p) out.push_back(j);
  }
  return out;
}

ComplexGraph build_complex_graph(const ReactionNetwork& net) {
  net.validate();
  ComplexGraph g;
  std::map<ComplexTerms, std::size_t> index;
  auto intern = [&](const ComplexTerms& c) {
    auto [it, inserted] = index.emplace(c, g.complexes.size());
    if (inserted) g.complexes.push_back(c);
    return it->second;
  };
  for (const auto& rx : net.reactions) {
    g.substrate.push_back(intern(rx.substrate));
    g.product.push_back(intern(rx.product));
  }
  const auto m = static_cast<Eigen::Index>(net.num_species());
  const auto c = static_cast<Eigen::Index>(g.complexes.size());
  const auto r = static_cast<Eigen::Index>(net.num_reactions());
  g.Z = IntMatrix::Zero(m, c);
  for (Eigen::Index rho = 0; rho < c; ++rho) {
    for (const auto& t : g.complexes[static_cast<std::size_t>(rho)]) {
      g.Z(static_cast<Eigen::Index>(t.species), rho) = t.coefficient;
    }
  }
  g.B = IntMatrix::Zero(c, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    g.B(static_cast<Eigen::Index>(g.substrate[static_cast<std::size_t>(j)]), j) = -1;
    g.B(static_cast<Eigen::Index>(g.product[static_cast<std::size_t>(j)]), j) = 1;
  }
  assign_classes(g);
  return g;
}

ComplexGraph complex_graph_from_matrices(IntMatrix Z, IntMatrix B) {
  if (Z.cols() != B.rows()) {
    throw InvalidArgument("Z has " + std::to_string(Z.cols()) + " columns but B has " +
                          std::to_string(B.rows()) + " rows");
  }
  if ((Z.array() < 0).any()) throw InvalidArgument("Z must be nonnegative");
  ComplexGraph g;
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    Eigen::Index tail = -1;
    Eigen::Index head = -1;
    for (Eigen::Index rho = 0; rho < B.rows(); ++rho) {
      const auto v = B(rho, j);
      if (v == -1 && tail < 0) {
        tail = rho;
      } else if (v == 1 && head < 0) {
        head = rho;
      } else if (v != 0) {
        throw InvalidArgument("column " + std::to_string(j) +
                              " of B is not an incidence column");
      }
    }
    if (tail < 0 || head < 0) {
      throw InvalidArgument("column " + std::to_string(j) +
                            " of B needs exactly one -1 and one +1");
    }
    g.substrate.push_back(static_cast<std::size_t>(tail));
    g.product.push_back(static_cast<std::size_t>(head));
  }
  for (Eigen::Index rho = 0; rho < Z.cols(); ++rho) {
    ComplexTerms terms;
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      if (Z(i, rho) != 0) terms.push_back({static_cast<std::size_t>(i), Z(i, rho)});
    }
    g.complexes.push_back(std::move(terms));
  }
  g.Z = std::move(Z);
  g.B = std::move(B);
  assign_classes(g);
  return g;
}

std::vector<std::vector<std::size_t>> linkage_classes(const ComplexGraph& g) {
  const std::size_t c = g.num_complexes();
  DisjointSets sets(c);
  for (std::size_t j = 0; j < g.num_reactions(); ++j) sets.unite(g.substrate[j], g.product[j]);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t rho = 0; rho < c; ++rho) groups[sets.find(rho)].push_back(rho);
  std::vector<std::vector<std::size_t>> classes;
  for (auto& [root, members] : groups) classes.push_back(std::move(members));
  // Roots are the smallest members, so map order is already by smallest member.
  if (exact::rank(g.B) != c - classes.size()) {
    throw Error("rank B differs from c - l; incidence matrix is inconsistent");
  }
  return classes;
}

std::vector<std::string> complex_labels(const ReactionNetwork& net, const ComplexGraph& g) {
  std::vector<std::string> out;
  out.reserve(g.complexes.size());
  for (const auto& c : g.complexes) out.push_back(net.complex_label(c));
  return out;
}

namespace {

IntMatrix columns(const IntMatrix& m, const std::vector<std::size_t>& cols) {
  IntMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = m.col(static_cast<Eigen::Index>(cols[k]));
  }
  return out;
}

}  // namespace

DeficiencyReport deficiency(const ComplexGraph& g) {
  DeficiencyReport rep;
  const IntMatrix s = g.stoichiometric_matrix();
  rep.rank_b = exact::rank(g.B);
  rep.rank_s = exact::rank(s);
  rep.deficiency = rep.rank_b - rep.rank_s;
  for (std::size_t p = 0; p < g.num_classes(); ++p) {
    const std::size_t rank_bp = g.linkage_classes[p].size() - 1;
    const std::size_t rank_sp = exact::rank(columns(s, g.class_reactions(p)));
    rep.per_class.push_back(rank_bp - rank_sp);
  }
  return rep;
}

CompositionReport zero_deficiency_composition_check(const ComplexGraph& g) {
  CompositionReport rep;
  const DeficiencyReport d = deficiency(g);
  rep.class_deficiencies = d.per_class;
  rep.deficiency = d.deficiency;
  rep.all_classes_zero_deficient =
      std::all_of(d.per_class.begin(), d.per_class.end(), [](auto v) { return v == 0; });
  rep.single_class = g.num_classes() <= 1;
  if (rep.single_class) return rep;

  const IntMatrix s = g.stoichiometric_matrix();
  std::vector<IntMatrix> images;
  std::size_t rank_sum = 0;
  for (std::size_t p = 0; p < g.num_classes(); ++p) {
    images.push_back(columns(s, g.class_reactions(p)));
    rank_sum += exact::rank(images.back());
  }
  rep.intersection_dimension = exact::column_space_intersection(images).size();
  rep.intersection_trivial = rep.intersection_dimension == 0;
  rep.images_independent = rank_sum == d.rank_s;
  return rep;
}

Matrix MoietyBasis::as_matrix(std::size_t num_species) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(num_species));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = rows[k].cast<double>().transpose();
  }
  return out;
}

MoietyBasis conserved_moieties(const ComplexGraph& g) {
  MoietyBasis basis;
  basis.rows = exact::left_kernel(g.stoichiometric_matrix());
  for (const auto& k : basis.rows) basis.nonnegative.push_back((k.array() >= 0).all());
  return basis;
}

}  // namespace crnkit

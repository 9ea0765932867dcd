#pragma once

// The complex graph of a reaction network: complex stoichiometric matrix Z,
// incidence matrix B, linkage classes, deficiency and conserved moieties.
// Everything here is integer data and is decided with exact arithmetic.

#include <cstddef>
#include <string>
#include <vector>

#include "crnkit/linalg.hpp"
#include "crnkit/network.hpp"

namespace crnkit {

struct ComplexGraph {
  IntMatrix Z;  // m x c, column rho expresses complex rho in the species
  IntMatrix B;  // c x r, -1 at the substrate (tail), +1 at the product (head)
  std::vector<ComplexTerms> complexes;
  /// Partition of the complex indices into connected components, each sorted,
  /// ordered by smallest member.
  std::vector<std::vector<std::size_t>> linkage_classes;
  std::vector<std::size_t> class_of;   // linkage class of each complex
  std::vector<std::size_t> substrate;  // tail complex of each reaction
  std::vector<std::size_t> product;    // head complex of each reaction

  std::size_t num_species() const { return static_cast<std::size_t>(Z.rows()); }
  std::size_t num_complexes() const { return static_cast<std::size_t>(Z.cols()); }
  std::size_t num_reactions() const { return static_cast<std::size_t>(B.cols()); }
  std::size_t num_classes() const { return linkage_classes.size(); }

  /// S = Z B.
  IntMatrix stoichiometric_matrix() const { return Z * B; }

  /// Reactions whose edge lies in linkage class p, in reaction order.
  std::vector<std::size_t> class_reactions(std::size_t p) const;
};

/// Deduplicates the reaction sides into complexes (first-appearance order) and
/// orients every edge substrate -> product as written.
ComplexGraph build_complex_graph(const ReactionNetwork& net);

/// Builds a graph from explicit matrices. Columns of Z need not be distinct,
/// which represents unidentified shared complexes after interconnection.
ComplexGraph complex_graph_from_matrices(IntMatrix Z, IntMatrix B);

/// Connected components of the undirected complex graph. Throws Error if the
/// exact rank of B disagrees with c - l.
std::vector<std::vector<std::size_t>> linkage_classes(const ComplexGraph& g);

std::vector<std::string> complex_labels(const ReactionNetwork& net,
                                        const ComplexGraph& g);

struct DeficiencyReport {
  std::size_t rank_b = 0;
  std::size_t rank_s = 0;
  std::size_t deficiency = 0;
  std::vector<std::size_t> per_class;
};

DeficiencyReport deficiency(const ComplexGraph& g);

struct CompositionReport {
  bool single_class = false;  // l = 1: nothing to compose, no intersection test
  std::vector<std::size_t> class_deficiencies;
  bool all_classes_zero_deficient = false;
  std::size_t deficiency = 0;
  /// Dimension of the intersection of the class images im(Z_p B_p).
  std::size_t intersection_dimension = 0;
  bool intersection_trivial = true;
  /// rank S equals the sum of the class ranks (the class images are independent).
  bool images_independent = true;
};

CompositionReport zero_deficiency_composition_check(const ComplexGraph& g);

struct MoietyBasis {
  /// Canonical basis of {k : k S = 0}: reduced echelon rows, primitive integers.
  std::vector<IntVector> rows;
  /// Whether each row is entrywise nonnegative (a conserved moiety proper).
  std::vector<bool> nonnegative;

  std::size_t size() const { return rows.size(); }
  /// Rows stacked into a (size x m) matrix of doubles.
  Matrix as_matrix(std::size_t num_species) const;
};

MoietyBasis conserved_moieties(const ComplexGraph& g);

}  // namespace crnkit

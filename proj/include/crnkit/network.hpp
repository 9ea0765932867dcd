#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crnkit/linalg.hpp"

namespace crnkit {

/// One species with its stoichiometric coefficient inside a complex.
struct Term {
  std::size_t species = 0;
  std::int64_t coefficient = 1;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

/// A complex as a multiset of species. Canonical form: sorted by species
/// index, one term per species, all coefficients positive.
using ComplexTerms = std::vector<Term>;

/// Merges repeated species and sorts by species index.
ComplexTerms canonical_complex(ComplexTerms terms);

struct Reaction {
  ComplexTerms substrate;
  ComplexTerms product;
  double k_forw = 0.0;
  double k_rev = 0.0;

  bool reversible() const { return k_forw > 0.0 && k_rev > 0.0; }

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

enum class BoundaryDirection { kUptake, kDemand };

/// A boundary species contributes one column of S_b: +1 for uptake, -1 for
/// demand, at the row of the species.
struct BoundarySpecies {
  std::size_t species = 0;
  BoundaryDirection direction = BoundaryDirection::kUptake;

  friend bool operator==(const BoundarySpecies&, const BoundarySpecies&) = default;
};

struct ReactionNetwork {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
  std::vector<BoundarySpecies> boundary;
  /// Declared thermodynamic equilibrium, if the source text carried one.
  std::optional<Vector> equilibrium;

  std::size_t num_species() const { return species.size(); }
  std::size_t num_reactions() const { return reactions.size(); }

  /// Index of a species by name; throws InvalidArgument if absent.
  std::size_t species_index(std::string_view name) const;
  std::optional<std::size_t> find_species(std::string_view name) const;

  /// Throws InvalidArgument describing the first broken invariant.
  void validate() const;

  /// Human-readable form of a complex, e.g. "E + 2 X".
  std::string complex_label(const ComplexTerms& complex) const;

  friend bool operator==(const ReactionNetwork& a, const ReactionNetwork& b);
};

/// The m x b boundary matrix S_b, one column per boundary species.
IntMatrix boundary_matrix(const ReactionNetwork& net);

}  // namespace crnkit

#include "crnkit/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace crnkit {

ComplexTerms canonical_complex(ComplexTerms terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.species < b.species; });
  ComplexTerms out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().species == t.species) {
      out.back().coefficient += t.coefficient;
    } else {
      out.push_back(t);
    }
  }
  return out;
}

std::optional<std::size_t> ReactionNetwork::find_species(std::string_view name) const {
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t ReactionNetwork::species_index(std::string_view name) const {
  if (auto i = find_species(name)) return *i;
  throw InvalidArgument("unknown species '" + std::string(name) + "'");
}

std::string ReactionNetwork::complex_label(const ComplexTerms& complex) const {
  std::string out;
  for (const auto& t : complex) {
    if (!out.empty()) out += " + ";
    if (t.coefficient != 1) out += std::to_string(t.coefficient) + " ";
    out += species.at(t.species);
  }
  return out;
}

void ReactionNetwork::validate() const {
  const std::size_t m = species.size();
  std::set<std::string> seen;
  for (const auto& s : species) {
    if (s.empty()) throw InvalidArgument("empty species name");
    if (!seen.insert(s).second) {
      throw InvalidArgument("duplicate species '" + s + "'");
    }
  }
  auto check_side = [m](const ComplexTerms& side, std::size_t j) {
    if (side.empty()) {
      throw InvalidArgument("reaction " + std::to_string(j) + " has an empty side");
    }
    for (std::size_t k = 0; k < side.size(); ++k) {
      if (side[k].species >= m) {
        throw InvalidArgument("reaction " + std::to_string(j) +
                              " references a species index out of range");
      }
      if (side[k].coefficient <= 0) {
        throw InvalidArgument("reaction " + std::to_string(j) +
                              " has a nonpositive coefficient");
      }
      if (k > 0 && side[k - 1].species >= side[k].species) {
        throw InvalidArgument("reaction " + std::to_string(j) +
                              " has a non-canonical complex");
      }
    }
  };
  for (std::size_t j = 0; j < reactions.size(); ++j) {
    const auto& rx = reactions[j];
    check_side(rx.substrate, j);
    check_side(rx.product, j);
    if (rx.substrate == rx.product) {
      throw InvalidArgument("reaction " + std::to_string(j) +
                            " has identical substrate and product");
    }
    if (!std::isfinite(rx.k_forw) || !std::isfinite(rx.k_rev) || rx.k_forw < 0.0 ||
        rx.k_rev < 0.0) {
      throw InvalidArgument("reaction " + std::to_string(j) +
                            " has an invalid rate constant");
    }
    if (rx.k_forw == 0.0 && rx.k_rev == 0.0) {
      throw InvalidArgument("reaction " + std::to_string(j) +
                            " has both rate constants zero");
    }
  }
  std::set<std::size_t> boundary_seen;
  for (const auto& b : boundary) {
    if (b.species >= m) throw InvalidArgument("boundary species out of range");
    if (!boundary_seen.insert(b.species).second) {
      throw InvalidArgument("species '" + species[b.species] +
                            "' declared boundary twice");
    }
  }
  if (equilibrium) {
    if (static_cast<std::size_t>(equilibrium->size()) != m) {
      throw InvalidArgument("declared equilibrium has wrong length");
    }
    for (Eigen::Index i = 0; i < equilibrium->size(); ++i) {
      if (!((*equilibrium)[i] > 0.0) || !std::isfinite((*equilibrium)[i])) {
        throw InvalidArgument("declared equilibrium must be strictly positive");
      }
    }
  }
}

bool operator==(const ReactionNetwork& a, const ReactionNetwork& b) {
  if (a.species != b.species || a.reactions != b.reactions ||
      a.boundary != b.boundary) {
    return false;
  }
  if (a.equilibrium.has_value() != b.equilibrium.has_value()) return false;
  if (!a.equilibrium) return true;
  return a.equilibrium->size() == b.equilibrium->size() &&
         *a.equilibrium == *b.equilibrium;
}

IntMatrix boundary_matrix(const ReactionNetwork& net) {
  IntMatrix sb = IntMatrix::Zero(static_cast<Eigen::Index>(net.num_species()),
                                 static_cast<Eigen::Index>(net.boundary.size()));
  for (std::size_t k = 0; k < net.boundary.size(); ++k) {
    const auto& b = net.boundary[k];
    sb(static_cast<Eigen::Index>(b.species), static_cast<Eigen::Index>(k)) =
        b.direction == BoundaryDirection::kUptake ? 1 : -1;
  }
  return sb;
}

}  // namespace crnkit

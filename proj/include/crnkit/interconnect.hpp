#pragma once

// Composition of two open networks through shared boundary species.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crnkit/kinetics.hpp"
#include "crnkit/network.hpp"
#include "crnkit/structure.hpp"

namespace crnkit {

struct InterconnectionSpec {
  /// (species of net1, species of net2) identified as one shared species.
  std::vector<std::pair<std::string, std::string>> pairs;
  bool identify_shared_complexes = false;
};

struct Interconnection {
  /// Species ordered (internal of net1, shared, internal of net2); shared
  /// species keep the name used in net1 and become internal.
  ReactionNetwork network;
  /// Complex graph with block-diagonal B. Without identification the Z
  /// columns of the two blocks may coincide.
  ComplexGraph graph;
  std::vector<std::size_t> species_of_first;   // composite index of net1 species
  std::vector<std::size_t> species_of_second;  // composite index of net2 species
  std::size_t num_internal_first = 0;
  std::size_t num_shared = 0;
  std::size_t num_internal_second = 0;
  std::size_t reactions_of_first = 0;  // reactions [0, r1) come from net1
  std::size_t complexes_of_first = 0;  // complexes [0, c1) come from net1
  /// Renamed internal species, "old -> new".
  std::vector<std::string> renamed;
};

/// Throws InvalidArgument for an invalid spec (unknown or non-boundary species,
/// a species paired twice) or a collision that prefixing cannot resolve.
Interconnection interconnect(const ReactionNetwork& net1, const ReactionNetwork& net2,
                             const InterconnectionSpec& spec);

struct CompositeBalance {
  Interconnection composite;
  BalanceResult balance;
  /// Sufficient partition condition; empty when b > 20 and the search is skipped.
  std::optional<bool> partition_condition;
  /// Shared indices assigned to net1 by the first partition found.
  std::vector<std::size_t> partition_first;
  /// Whether column i of S_1^T restricted to the shared species lies in the
  /// image of S_1^T restricted to the internal species (likewise for net2).
  std::vector<bool> column_in_image_first;
  std::vector<bool> column_in_image_second;
  /// d_p per linkage class of each constituent: K_p(composite x**) = d_p K_p(x*).
  std::vector<double> scaling_first;
  std::vector<double> scaling_second;
};

/// Both constituents must be balanced (bf1, bf2 are their balanced forms).
CompositeBalance composite_balanced(const ReactionNetwork& net1, const BalancedForm& bf1,
                                    const ReactionNetwork& net2, const BalancedForm& bf2,
                                    const InterconnectionSpec& spec);

struct PortEquivalenceReport {
  std::size_t samples = 0;
  /// max ||f_composite - f_port||_inf / max(1, ||f_composite||_inf).
  double max_discrepancy = 0.0;
  /// max |mu_b1^T v_b1 + mu_b2^T v_b2|.
  double max_power_residual = 0.0;
  /// max(||f_composite(x**)||_inf, ||f_port(x**)||_inf).
  double equilibrium_field_norm = 0.0;
};

/// Compares the composite field with the field obtained by coupling the two
/// constituents through ports mu_b1 = mu_b2, v_b1 + v_b2 = 0, at random states
/// drawn log-uniformly from [0.1, 10]. Throws InvalidArgument if the composite
/// is not balanced.
PortEquivalenceReport port_interconnection_equivalence_test(const ReactionNetwork& net1,
                                                            const ReactionNetwork& net2,
                                                            const InterconnectionSpec& spec,
                                                            std::size_t samples,
                                                            std::uint64_t seed = 1);

}  // namespace crnkit

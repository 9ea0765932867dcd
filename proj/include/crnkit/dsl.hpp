#pragma once

// Line-oriented text format for reaction networks:
//
//   # comment
//   species: X1 X2 X3                      (optional, fixes ordering)
//   X1 + 2 X2 <-> X3 ; kf=1 kr=0.5
//   X3 -> 2 X1 + X2 ; kf=2                 (irreversible, kr = 0)
//   boundary: X3 in                        (uptake; "out" for demand)
//   equilibrium: X1=1 X2=1 X3=1            (optional declared x*)
//
// Coefficients are decimal integers; a missing coefficient means 1.

#include <filesystem>
#include <string>
#include <string_view>

#include "crnkit/network.hpp"

namespace crnkit {

/// Parses and validates network text. Throws ParseError with the 1-based
/// line and column of the offending token.
ReactionNetwork parse_network(std::string_view text);

ReactionNetwork read_network_file(const std::filesystem::path& path);

/// Canonical text form; parse_network(render_network(n)) == n for every
/// valid network. Throws InvalidArgument for a network without species.
std::string render_network(const ReactionNetwork& net);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace crnkit

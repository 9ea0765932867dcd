#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "crnkit/dsl.hpp"
#include "crnkit/kinetics.hpp"
#include "crnkit/network.hpp"
#include "crnkit/structure.hpp"

namespace crnkit::testing {

inline constexpr const char* kTwoReactions =
    "X1 + 2 X2 <-> X3 ; kf=1 kr=1\n"
    "X3 <-> 2 X1 + X2 ; kf=1 kr=1\n";

inline constexpr const char* kEnzymatic =
    "species: X Y E I\n"
    "E + X <-> I ; kf=2 kr=1\n"
    "I <-> E + Y ; kf=1 kr=3\n";

inline constexpr const char* kTriangle =
    "A <-> B ; kf=2 kr=1\n"
    "B <-> C ; kf=1 kr=1\n"
    "C <-> A ; kf=1 kr=2\n";

inline constexpr const char* kDeficiencyOne =
    "X1 <-> X2 ; kf=2 kr=1\n"
    "2 X1 <-> X1 + X2 ; kf=4 kr=2\n";

inline constexpr const char* kDimer =
    "2 A <-> B ; kf=3 kr=1\n"
    "A + B <-> C ; kf=1 kr=2\n";

inline constexpr const char* kOpenExample =
    "X1 + 2 X2 + 2 X3 <-> 2 X4 + 2 X5 + 2 X6 ; kf=1 kr=1\n"
    "boundary: X3 in\n"
    "boundary: X6 out\n";

/// Balanced test networks used by property suites.
inline std::vector<std::string> balanced_networks() {
  return {kTwoReactions, kEnzymatic, kTriangle, kDeficiencyOne, kDimer,
          "A <-> B ; kf=2 kr=1\n"};
}

struct Prepared {
  ReactionNetwork net;
  ComplexGraph g;
  BalancedForm bf;
};

inline Prepared prepare(const std::string& text) {
  Prepared p;
  p.net = parse_network(text);
  p.g = build_complex_graph(p.net);
  p.bf = *find_thermodynamic_equilibrium(p.net, p.g).form;
  return p;
}

/// Log-uniform positive vector with entries in [lo, hi].
inline Vector random_positive(std::mt19937_64& rng, Eigen::Index n, double lo = 0.1,
                              double hi = 10.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = std::exp(u(rng));
  return x;
}

inline double rel_err(const Vector& a, const Vector& b) {
  const double scale = std::max({1.0, a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace crnkit::testing

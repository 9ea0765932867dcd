#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "crnkit/errors.hpp"

namespace crnkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Throws NonPositiveConcentration unless every entry is finite and > 0.
inline void require_positive(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
      throw NonPositiveConcentration(static_cast<std::size_t>(i));
    }
  }
}

inline Matrix to_double(const IntMatrix& m) { return m.cast<double>(); }

}  // namespace crnkit

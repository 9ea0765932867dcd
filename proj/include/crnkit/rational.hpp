#pragma once

// Exact linear algebra over the rationals for integer matrices. Ranks,
// kernels and subspace intersections of stoichiometric data are decided here
// without floating-point tolerances.

#include <cstddef>
#include <vector>

#include <gmpxx.h>

#include "crnkit/linalg.hpp"

namespace crnkit::exact {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static RationalMatrix from_integer(const IntMatrix& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  mpq_class& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  const mpq_class& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  RationalMatrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpq_class> data_;
};

struct Echelon {
  RationalMatrix reduced;            // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

Echelon row_reduce(RationalMatrix m);

std::size_t rank(const RationalMatrix& m);
std::size_t rank(const IntMatrix& m);

/// Scales a rational vector to the primitive integer vector with the same
/// direction whose first nonzero entry is positive. The zero vector maps to
/// itself.
IntVector primitive(const std::vector<mpq_class>& v);

/// Canonical basis of {x : A x = 0}: the reduced row echelon form of the
/// kernel, each row scaled to a primitive integer vector.
std::vector<IntVector> right_kernel(const IntMatrix& a);

/// Canonical basis of {k : k A = 0} (row vectors), same normalisation.
std::vector<IntVector> left_kernel(const IntMatrix& a);

/// True iff v lies in the column space of a.
bool in_column_space(const IntMatrix& a, const IntVector& v);

/// Basis (as columns) of the intersection of the column spaces of all
/// matrices in `spaces`. All matrices must have the same number of rows.
/// The basis is canonical: reduced echelon rows, primitive integers.
std::vector<IntVector> column_space_intersection(
    const std::vector<IntMatrix>& spaces);

}  // namespace crnkit::exact

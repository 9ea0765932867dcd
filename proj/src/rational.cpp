#include "crnkit/rational.hpp"

#include <utility>

namespace crnkit::exact {

RationalMatrix RationalMatrix::from_integer(const IntMatrix& m) {
  RationalMatrix out(static_cast<std::size_t>(m.rows()),
                     static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out(r, c) = mpq_class(static_cast<long>(m(r, c)));
    }
  }
  return out;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

Echelon row_reduce(RationalMatrix m) {
  Echelon e;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && sgn(m(pivot, col)) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        std::swap(m(pivot, c), m(row, c));
      }
    }
    const mpq_class inv = 1 / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || sgn(m(r, col)) == 0) continue;
      const mpq_class factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) {
        m(r, c) -= factor * m(row, c);
      }
    }
    e.pivots.push_back(col);
    ++row;
  }
  e.reduced = std::move(m);
  return e;
}

std::size_t rank(const RationalMatrix& m) { return row_reduce(m).pivots.size(); }

std::size_t rank(const IntMatrix& m) {
  return rank(RationalMatrix::from_integer(m));
}

IntVector primitive(const std::vector<mpq_class>& v) {
  mpz_class lcm_den = 1;
  for (const auto& q : v) {
    if (sgn(q) != 0) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(),
                             q.get_den_mpz_t());
  }
  std::vector<mpz_class> ints;
  ints.reserve(v.size());
  mpz_class g = 0;
  for (const auto& q : v) {
    mpz_class n = q.get_num() * (lcm_den / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    ints.push_back(std::move(n));
  }
  IntVector out = IntVector::Zero(static_cast<Eigen::Index>(v.size()));
  if (g == 0) return out;
  int sign = 0;
  for (const auto& n : ints) {
    if (sgn(n) != 0) {
      sign = sgn(n);
      break;
    }
  }
  for (std::size_t i = 0; i < ints.size(); ++i) {
    mpz_class n = ints[i] / g * sign;
    if (!n.fits_slong_p()) throw Error("integer overflow in exact kernel");
    out[static_cast<Eigen::Index>(i)] = n.get_si();
  }
  return out;
}

namespace {

// Rows of `rows` reduced to canonical echelon form and made primitive.
std::vector<IntVector> canonical_rows(const std::vector<std::vector<mpq_class>>& rows,
                                      std::size_t width) {
  if (rows.empty()) return {};
  RationalMatrix m(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) m(r, c) = rows[r][c];
  }
  const Echelon e = row_reduce(std::move(m));
  std::vector<IntVector> out;
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    std::vector<mpq_class> row(width);
    for (std::size_t c = 0; c < width; ++c) row[c] = e.reduced(r, c);
    out.push_back(primitive(row));
  }
  return out;
}

std::vector<std::vector<mpq_class>> kernel_rows(const RationalMatrix& a) {
  const Echelon e = row_reduce(a);
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<mpq_class>> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<mpq_class> v(n);
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      v[e.pivots[r]] = -e.reduced(r, free);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

std::vector<IntVector> right_kernel(const IntMatrix& a) {
  const auto q = RationalMatrix::from_integer(a);
  return canonical_rows(kernel_rows(q), q.cols());
}

std::vector<IntVector> left_kernel(const IntMatrix& a) {
  IntMatrix at = a.transpose();
  return right_kernel(at);
}

bool in_column_space(const IntMatrix& a, const IntVector& v) {
  if (v.size() != a.rows()) throw InvalidArgument("in_column_space: size mismatch");
  IntMatrix aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = v;
  return rank(aug) == rank(a);
}

std::vector<IntVector> column_space_intersection(
    const std::vector<IntMatrix>& spaces) {
  if (spaces.empty()) return {};
  const auto n = static_cast<std::size_t>(spaces.front().rows());
  for (const auto& s : spaces) {
    if (static_cast<std::size_t>(s.rows()) != n) {
      throw InvalidArgument("column_space_intersection: row count mismatch");
    }
  }

  // Current intersection kept as a list of rational column vectors.
  auto basis_of = [n](const RationalMatrix& cols_as_rows) {
    const Echelon e = row_reduce(cols_as_rows);
    std::vector<std::vector<mpq_class>> out;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      std::vector<mpq_class> v(n);
      for (std::size_t c = 0; c < n; ++c) v[c] = e.reduced(r, c);
      out.push_back(std::move(v));
    }
    return out;
  };

  std::vector<std::vector<mpq_class>> current =
      basis_of(RationalMatrix::from_integer(spaces.front()).transpose());

  for (std::size_t s = 1; s < spaces.size() && !current.empty(); ++s) {
    const auto other =
        basis_of(RationalMatrix::from_integer(spaces[s]).transpose());
    if (other.empty()) {
      current.clear();
      break;
    }
    // Solve [U  -V] [a; b] = 0; the intersection is spanned by U a.
    const std::size_t ku = current.size();
    const std::size_t kv = other.size();
    RationalMatrix system(n, ku + kv);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < ku; ++j) system(r, j) = current[j][r];
      for (std::size_t j = 0; j < kv; ++j) system(r, ku + j) = -other[j][r];
    }
    const auto ker = kernel_rows(system);
    if (ker.empty()) {
      current.clear();
      break;
    }
    RationalMatrix images(ker.size(), n);
    for (std::size_t k = 0; k < ker.size(); ++k) {
      for (std::size_t r = 0; r < n; ++r) {
        mpq_class acc = 0;
        for (std::size_t j = 0; j < ku; ++j) acc += ker[k][j] * current[j][r];
        images(k, r) = acc;
      }
    }
    current = basis_of(images);
  }
  return canonical_rows(current, n);
}

}  // namespace crnkit::exact

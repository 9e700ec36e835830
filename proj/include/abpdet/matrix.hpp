#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "abpdet/poly.hpp"

namespace abpdet {

// Dense matrix of field scalars (row-major).
struct ScalarMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<u64> a;

  ScalarMatrix() = default;
  ScalarMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

  static ScalarMatrix identity(std::size_t n) {
    ScalarMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  u64& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  u64 at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

  bool is_zero() const {
    for (u64 v : a)
      if (v) return false;
    return true;
  }

  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for (u64 v : a)
      if (v) ++n;
    return n;
  }

  friend bool operator==(const ScalarMatrix&, const ScalarMatrix&) = default;
};

inline ScalarMatrix mat_add(const ScalarMatrix& x, const ScalarMatrix& y, const PrimeField& F) {
  if (x.rows != y.rows || x.cols != y.cols) throw Error("matrix shape mismatch in add");
  ScalarMatrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = F.add(r.a[i], y.a[i]);
  return r;
}

inline ScalarMatrix mat_add_scaled(const ScalarMatrix& x, const ScalarMatrix& y, u64 s,
                                   const PrimeField& F) {
  if (x.rows != y.rows || x.cols != y.cols) throw Error("matrix shape mismatch in add");
  ScalarMatrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = F.add(r.a[i], F.mul(y.a[i], s));
  return r;
}

inline ScalarMatrix mat_mul(const ScalarMatrix& x, const ScalarMatrix& y, const PrimeField& F) {
  if (x.cols != y.rows) throw Error("matrix shape mismatch in mul");
  ScalarMatrix r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      u64 v = x.at(i, k);
      if (!v) continue;
      for (std::size_t j = 0; j < y.cols; ++j)
        r.at(i, j) = F.add(r.at(i, j), F.mul(v, y.at(k, j)));
    }
  return r;
}

// Rank by Gaussian elimination (works on a copy).
inline std::size_t rank(ScalarMatrix m, const PrimeField& F) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t piv = r;
    while (piv < m.rows && m.at(piv, c) == 0) ++piv;
    if (piv == m.rows) continue;
    if (piv != r)
      for (std::size_t k = 0; k < m.cols; ++k) std::swap(m.at(piv, k), m.at(r, k));
    u64 inv = F.inv(m.at(r, c));
    for (std::size_t i = r + 1; i < m.rows; ++i) {
      u64 f = F.mul(m.at(i, c), inv);
      if (!f) continue;
      for (std::size_t k = c; k < m.cols; ++k)
        m.at(i, k) = F.sub(m.at(i, k), F.mul(f, m.at(r, k)));
    }
    ++r;
  }
  return r;
}

// Determinant by elimination with row pivoting, sign-tracked; singular -> 0.
inline u64 det(ScalarMatrix m, const PrimeField& F) {
  if (m.rows != m.cols) throw Error("determinant needs a square matrix");
  std::size_t n = m.rows;
  u64 d = 1;
  bool negate = false;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m.at(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t k = c; k < n; ++k) std::swap(m.at(piv, k), m.at(c, k));
      negate = !negate;
    }
    d = F.mul(d, m.at(c, c));
    u64 inv = F.inv(m.at(c, c));
    for (std::size_t i = c + 1; i < n; ++i) {
      u64 f = F.mul(m.at(i, c), inv);
      if (!f) continue;
      for (std::size_t k = c; k < n; ++k)
        m.at(i, k) = F.sub(m.at(i, k), F.mul(f, m.at(c, k)));
    }
  }
  return negate ? F.neg(d) : d;
}

// Dense matrix of affine forms.
struct AffineMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<AffineForm> e;

  AffineMatrix() = default;
  AffineMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}

  AffineForm& at(std::size_t r, std::size_t c) { return e[r * cols + c]; }
  const AffineForm& at(std::size_t r, std::size_t c) const { return e[r * cols + c]; }

  friend bool operator==(const AffineMatrix&, const AffineMatrix&) = default;
};

inline ScalarMatrix eval_matrix(const AffineMatrix& m, const Assignment& a, const PrimeField& F) {
  ScalarMatrix r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r.at(i, j) = eval_affine(m.at(i, j), a, F);
  return r;
}

inline ScalarMatrix constant_part(const AffineMatrix& m) {
  ScalarMatrix r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.e.size(); ++i) r.a[i] = m.e[i].constant;
  return r;
}

namespace detail {
// Laplace expansion over column subsets: state = set of used columns, level =
// popcount. O(2^n * n) polynomial operations; exact for n up to ~14.
inline SparsePoly det_symbolic_rec(const AffineMatrix& m, u64 mask, std::size_t row,
                                   std::unordered_map<u64, SparsePoly>& memo, const PrimeField& F,
                                   std::size_t cap) {
  std::size_t n = m.rows;
  if (row == n) {
    SparsePoly one;
    one.coeffs.emplace(Monomial{}, 1);
    return one;
  }
  auto it = memo.find(mask);
  if (it != memo.end()) return it->second;
  SparsePoly acc;
  bool positive = true;  // sign alternates over the unused columns only
  for (std::size_t j = 0; j < n; ++j) {
    if (mask & (u64(1) << j)) continue;
    if (!m.at(row, j).is_zero()) {
      SparsePoly sub = det_symbolic_rec(m, mask | (u64(1) << j), row + 1, memo, F, cap);
      SparsePoly term = poly_mul_affine(sub, m.at(row, j), F, cap);
      if (!positive) term = poly_scale(term, F.neg(1), F);
      poly_add_in_place(acc, term, F, cap);
    }
    positive = !positive;
  }
  memo.emplace(mask, acc);
  return acc;
}
}  // namespace detail

// Exact symbolic determinant of an affine matrix (sparse polynomial output).
inline SparsePoly det_symbolic(const AffineMatrix& m, const PrimeField& F,
                               std::size_t cap = 1000000) {
  if (m.rows != m.cols) throw Error("determinant needs a square matrix");
  if (m.rows > 24) throw Error("symbolic determinant limited to n <= 24");
  if (m.rows == 0) {
    SparsePoly one;
    one.coeffs.emplace(Monomial{}, 1);
    return one;
  }
  std::unordered_map<u64, SparsePoly> memo;
  return detail::det_symbolic_rec(m, 0, 0, memo, F, cap);
}

}  // namespace abpdet

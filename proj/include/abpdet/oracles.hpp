#pragma once

#include <algorithm>
#include <bit>
#include <numeric>
#include <vector>

#include "abpdet/matrix.hpp"

namespace abpdet {

enum class TargetKind { det, perm, generic };

inline const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::det: return "det";
    case TargetKind::perm: return "perm";
    default: return "generic";
  }
}

inline ScalarMatrix matrix_from_assignment(int m, const Assignment& a) {
  ScalarMatrix M(m, m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) M.at(i - 1, j - 1) = a.at(matrix_var(i, j));
  return M;
}

// det_m at an assignment of all m^2 variables, by Gaussian elimination.
inline u64 det_reference(int m, const Assignment& a, const PrimeField& F) {
  if (m < 1) throw Error("det_reference needs m >= 1");
  return det(matrix_from_assignment(m, a), F);
}

// perm_m by Ryser's inclusion-exclusion with Gray-code row-sum updates,
// O(2^m * m) field operations. perm(A) = (-1)^m sum_{S != 0} (-1)^|S| prod_i sum_{j in S} a_ij.
inline u64 perm_reference(int m, const Assignment& a, const PrimeField& F) {
  if (m < 1 || m > 24) throw Error("perm_reference supports 1 <= m <= 24");
  ScalarMatrix M = matrix_from_assignment(m, a);
  std::vector<u64> rowsum(m, 0);
  u64 total = 0;
  u64 prev = 0;
  for (u64 k = 1; k < (u64(1) << m); ++k) {
    u64 gray = k ^ (k >> 1);
    u64 diff = gray ^ prev;
    int j = std::countr_zero(diff);
    bool added = gray & diff;
    for (int i = 0; i < m; ++i) {
      u64 v = M.at(i, j);
      rowsum[i] = added ? F.add(rowsum[i], v) : F.sub(rowsum[i], v);
    }
    prev = gray;
    u64 prod = 1;
    for (int i = 0; i < m; ++i) prod = F.mul(prod, rowsum[i]);
    int bits = std::popcount(gray);
    total = (bits % 2 == 0) ? F.add(total, prod) : F.sub(total, prod);
  }
  return (m % 2 == 0) ? total : F.neg(total);
}

// perm_m as the literal m!-term sum; kept as a cross-check for Ryser.
inline u64 perm_naive(int m, const Assignment& a, const PrimeField& F) {
  if (m < 1 || m > 10) throw Error("perm_naive supports 1 <= m <= 10");
  ScalarMatrix M = matrix_from_assignment(m, a);
  std::vector<int> sigma(m);
  std::iota(sigma.begin(), sigma.end(), 0);
  u64 total = 0;
  do {
    u64 prod = 1;
    for (int i = 0; i < m; ++i) prod = F.mul(prod, M.at(i, sigma[i]));
    total = F.add(total, prod);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

namespace detail {
inline int permutation_parity(const std::vector<int>& sigma) {
  int n = (int)sigma.size(), parity = 0;
  std::vector<bool> seen(n, false);
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int j = i, len = 0;
    while (!seen[j]) {
      seen[j] = true;
      j = sigma[j];
      ++len;
    }
    if (len % 2 == 0) parity ^= 1;
  }
  return parity;
}
}  // namespace detail

// Symbolic det/perm of the submatrix (rows, cols) of the variable matrix, as a
// sparse polynomial: sum over bijections rows -> cols (signed for det). Rows
// and cols are 1-based index sets of equal size.
inline SparsePoly subtarget_poly(TargetKind kind, std::vector<int> rows, std::vector<int> cols,
                                 const PrimeField& F) {
  if (rows.size() != cols.size()) throw Error("subtarget_poly needs |rows| == |cols|");
  if (rows.size() > 10) throw Error("subtarget_poly supports size <= 10");
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  int s = (int)rows.size();
  SparsePoly p;
  if (s == 0) {
    p.coeffs.emplace(Monomial{}, 1);
    return p;
  }
  std::vector<int> sigma(s);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    std::vector<VarId> vars;
    vars.reserve(s);
    for (int i = 0; i < s; ++i) vars.push_back(matrix_var(rows[i], cols[sigma[i]]));
    u64 c = 1;
    if (kind == TargetKind::det && detail::permutation_parity(sigma)) c = F.neg(1);
    poly_add_term(p, make_monomial(std::move(vars)), c, F);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return p;
}

// Full signed Leibniz polynomial of det_m (or the m!-term perm_m).
inline SparsePoly target_poly(TargetKind kind, int m, const PrimeField& F) {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 1);
  return subtarget_poly(kind, idx, idx, F);
}

}  // namespace abpdet

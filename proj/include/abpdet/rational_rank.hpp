#pragma once

#include <gmpxx.h>

#include <vector>

#include "abpdet/matrix.hpp"

namespace abpdet {

// Exact rank of an integer matrix by fraction-free (Bareiss) elimination over
// arbitrary-precision integers. Used to double-check F_p ranks of expressions
// with small integer entries, where a bad prime could in principle drop the
// rank.
inline std::size_t rank_exact_integer(const std::vector<std::vector<long long>>& in) {
  if (in.empty()) return 0;
  std::size_t rows = in.size(), cols = in[0].size();
  std::vector<std::vector<mpz_class>> M(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) M[i][j] = static_cast<long>(in[i][j]);

  mpz_class prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && M[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r) std::swap(M[piv], M[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_class t = M[i][j] * M[r][c] - M[i][c] * M[r][j];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        M[i][j] = t;
      }
      M[i][c] = 0;
    }
    prev = M[r][c];
    ++r;
  }
  return r;
}

// Rank over the rationals of a residue matrix, reading entries through their
// balanced representatives.
inline std::size_t rank_rational(const ScalarMatrix& m, const PrimeField& F) {
  std::vector<std::vector<long long>> M(m.rows, std::vector<long long>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) M[i][j] = F.to_balanced(m.at(i, j));
  return rank_exact_integer(M);
}

}  // namespace abpdet

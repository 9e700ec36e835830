#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "abpdet/matrix.hpp"

namespace abpdet {

// Token grammar for printed matrices: 0, 1, -1, x{u}{v} or -x{u}{v} for
// single-digit indices; x{u}_{v} once any index needs two digits. Entries
// outside the grammar (general affine forms) are rejected; those go through
// the JSON emitter instead.
inline std::string entry_token(const AffineForm& f, int m, const PrimeField& F) {
  bool wide = m >= 10;
  if (f.terms.empty()) {
    if (f.constant == 0) return "0";
    if (f.constant == 1) return "1";
    if (f.constant == F.neg(1)) return "-1";
    throw Error("matrix entry outside the text token grammar (constant)");
  }
  if (f.constant != 0 || f.terms.size() != 1)
    throw Error("matrix entry outside the text token grammar (general affine form)");
  const auto& [v, c] = *f.terms.begin();
  std::string tok = wide ? "x" + std::to_string(v.row) + "_" + std::to_string(v.col)
                         : "x" + std::to_string(v.row) + std::to_string(v.col);
  if (c == 1) return tok;
  if (c == F.neg(1)) return "-" + tok;
  throw Error("matrix entry outside the text token grammar (coefficient)");
}

// Whitespace-separated right-aligned tokens, one matrix row per line.
inline std::string emit_text(const AffineMatrix& A, int m, const PrimeField& F) {
  std::vector<std::string> toks(A.rows * A.cols);
  std::size_t width = 1;
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) {
      toks[i * A.cols + j] = entry_token(A.at(i, j), m, F);
      width = std::max(width, toks[i * A.cols + j].size());
    }
  std::ostringstream out;
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) {
      const std::string& t = toks[i * A.cols + j];
      if (j) out << ' ';
      out << std::string(width - t.size(), ' ') << t;
    }
    out << '\n';
  }
  return out.str();
}

// Token streams compare equal after whitespace normalization.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

}  // namespace abpdet

#pragma once

#include <map>
#include <vector>

#include "abpdet/field.hpp"
#include "abpdet/varid.hpp"

namespace abpdet {

// Total map from a variable universe to scalars (an evaluation point).
struct Assignment {
  std::map<VarId, u64> values;

  u64 at(VarId v) const {
    auto it = values.find(v);
    if (it == values.end()) throw Error("assignment is missing variable " + to_string(v));
    return it->second;
  }

  void set(VarId v, u64 value) { values[v] = value; }
};

// All m*m matrix variables y^{i,j}.
inline std::vector<VarId> matrix_universe(int m) {
  std::vector<VarId> vars;
  vars.reserve((std::size_t)m * m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) vars.push_back(matrix_var(i, j));
  return vars;
}

// Assignment from row-major matrix values (1-based variable indices).
inline Assignment assignment_from_matrix(const std::vector<std::vector<u64>>& rows) {
  Assignment a;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      a.set(matrix_var((int)i + 1, (int)j + 1), rows[i][j]);
  return a;
}

// Affine linear form: constant + sum of coeff * variable. Zero coefficients
// are never stored.
struct AffineForm {
  u64 constant = 0;
  std::map<VarId, u64> terms;

  bool is_zero() const { return constant == 0 && terms.empty(); }
  // Convention: linear means no constant part (the zero form counts).
  bool is_linear() const { return constant == 0; }
  bool is_constant() const { return terms.empty(); }

  friend bool operator==(const AffineForm&, const AffineForm&) = default;
  friend auto operator<=>(const AffineForm&, const AffineForm&) = default;
};

inline AffineForm af_constant(u64 c) { return AffineForm{c, {}}; }

inline AffineForm af_var(VarId v, u64 coeff = 1) {
  AffineForm f;
  if (coeff != 0) f.terms[v] = coeff;
  return f;
}

inline void af_add_term(AffineForm& f, VarId v, u64 coeff, const PrimeField& F) {
  if (coeff == 0) return;
  u64 c = F.add(f.terms.count(v) ? f.terms[v] : 0, coeff);
  if (c == 0)
    f.terms.erase(v);
  else
    f.terms[v] = c;
}

inline AffineForm af_add(const AffineForm& a, const AffineForm& b, const PrimeField& F) {
  AffineForm r = a;
  r.constant = F.add(r.constant, b.constant);
  for (const auto& [v, c] : b.terms) af_add_term(r, v, c, F);
  return r;
}

inline AffineForm af_scale(const AffineForm& a, u64 s, const PrimeField& F) {
  AffineForm r;
  if (s == 0) return r;
  r.constant = F.mul(a.constant, s);
  for (const auto& [v, c] : a.terms) r.terms[v] = F.mul(c, s);
  return r;
}

inline AffineForm linear_part(const AffineForm& a) {
  AffineForm r = a;
  r.constant = 0;
  return r;
}

inline u64 eval_affine(const AffineForm& f, const Assignment& a, const PrimeField& F) {
  u64 acc = f.constant;
  for (const auto& [v, c] : f.terms) acc = F.add(acc, F.mul(c, a.at(v)));
  return acc;
}

}  // namespace abpdet

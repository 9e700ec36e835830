#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "abpdet/affine.hpp"

namespace abpdet {

// A monomial is the sorted multiset of its variables (repetition = power).
using Monomial = std::vector<VarId>;

inline Monomial monomial_with(const Monomial& m, VarId v) {
  Monomial r = m;
  r.insert(std::upper_bound(r.begin(), r.end(), v), v);
  return r;
}

// Exact sparse multivariate polynomial over the prime field. Coefficient maps
// never hold zeros; the map order gives the canonical monomial order used by
// coefficient-matrix constructions.
struct SparsePoly {
  std::map<Monomial, u64> coeffs;

  bool is_zero() const { return coeffs.empty(); }
  std::size_t monomial_count() const { return coeffs.size(); }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : coeffs) d = std::max<int>(d, (int)m.size());
    return d;
  }

  bool is_homogeneous() const {
    if (coeffs.empty()) return true;
    std::size_t d = coeffs.begin()->first.size();
    for (const auto& [m, c] : coeffs)
      if (m.size() != d) return false;
    return true;
  }

  friend bool operator==(const SparsePoly&, const SparsePoly&) = default;
};

inline void poly_add_term(SparsePoly& p, const Monomial& m, u64 c, const PrimeField& F) {
  if (c == 0) return;
  auto it = p.coeffs.find(m);
  if (it == p.coeffs.end()) {
    p.coeffs.emplace(m, c);
    return;
  }
  it->second = F.add(it->second, c);
  if (it->second == 0) p.coeffs.erase(it);
}

inline void poly_add_in_place(SparsePoly& p, const SparsePoly& q, const PrimeField& F,
                              std::size_t cap) {
  for (const auto& [m, c] : q.coeffs) poly_add_term(p, m, c, F);
  if (p.coeffs.size() > cap) throw CapExceeded(p.coeffs.size());
}

inline SparsePoly poly_from_affine(const AffineForm& f) {
  SparsePoly p;
  if (f.constant != 0) p.coeffs.emplace(Monomial{}, f.constant);
  for (const auto& [v, c] : f.terms) p.coeffs.emplace(Monomial{v}, c);
  return p;
}

inline SparsePoly poly_scale(const SparsePoly& p, u64 s, const PrimeField& F) {
  SparsePoly r;
  if (s == 0) return r;
  for (const auto& [m, c] : p.coeffs) r.coeffs.emplace(m, F.mul(c, s));
  return r;
}

inline SparsePoly poly_mul_affine(const SparsePoly& p, const AffineForm& f, const PrimeField& F,
                                  std::size_t cap) {
  SparsePoly r;
  for (const auto& [m, c] : p.coeffs) {
    if (f.constant != 0) poly_add_term(r, m, F.mul(c, f.constant), F);
    for (const auto& [v, k] : f.terms) poly_add_term(r, monomial_with(m, v), F.mul(c, k), F);
    if (r.coeffs.size() > cap) throw CapExceeded(r.coeffs.size());
  }
  return r;
}

inline SparsePoly degree_component(const SparsePoly& p, int d) {
  SparsePoly r;
  for (const auto& [m, c] : p.coeffs)
    if ((int)m.size() == d) r.coeffs.emplace(m, c);
  return r;
}

inline u64 eval_poly(const SparsePoly& p, const Assignment& a, const PrimeField& F) {
  u64 acc = 0;
  for (const auto& [m, c] : p.coeffs) {
    u64 t = c;
    for (VarId v : m) t = F.mul(t, a.at(v));
    acc = F.add(acc, t);
  }
  return acc;
}

inline u64 coefficient_of(const SparsePoly& p, const Monomial& m) {
  auto it = p.coeffs.find(m);
  return it == p.coeffs.end() ? 0 : it->second;
}

inline Monomial make_monomial(std::vector<VarId> vars) {
  std::sort(vars.begin(), vars.end());
  return vars;
}

}  // namespace abpdet

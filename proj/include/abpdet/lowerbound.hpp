#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "abpdet/abp.hpp"
#include "abpdet/oracles.hpp"

namespace abpdet {

// Rank witness for one layer of a degree-layered program: the rank of the
// (vertices x monomials) coefficient matrix of the polynomials computed at
// that layer. vertex_count >= coeff_rank always holds (row count bounds
// rank); once a bound is attached, holds means
// vertex_count >= coeff_rank >= bound.
struct LayerRankCertificate {
  int layer = 0;
  int vertex_count = 0;
  int coeff_rank = 0;
  long long bound = 0;
  bool holds = false;
  bool span_ok = true;  // span-membership side condition, when checked
};

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace detail {
struct LayerPolys {
  std::vector<SparsePoly> polys;  // one per vertex of the layer, in vertex order
};

inline LayerPolys layer_polynomials(const Abp& g, int s, const PrimeField& F, std::size_t cap) {
  AbpReport rep = validate(g);
  if (!rep.is_degree_layered || rep.is_canonical_zero)
    throw Error("layer certificates need a degree-layered ABP");
  auto layer = *layers_of(g);
  int top = *std::max_element(layer.begin(), layer.end());
  if (s < 0 || s > top) throw Error("layer index out of range: " + std::to_string(s));
  std::vector<SparsePoly> all = all_vertex_polynomials(g, F, cap);
  LayerPolys out;
  for (int v = 0; v < g.size(); ++v)
    if (layer[v] == s) out.polys.push_back(std::move(all[v]));
  return out;
}

// Coefficient matrix over the canonically ordered union of monomials.
inline ScalarMatrix coefficient_matrix(const std::vector<SparsePoly>& polys) {
  std::map<Monomial, std::size_t> col;
  for (const auto& p : polys)
    for (const auto& [mo, c] : p.coeffs) col.emplace(mo, 0);
  std::size_t k = 0;
  for (auto& [mo, idx] : col) idx = k++;
  ScalarMatrix M(polys.size(), std::max<std::size_t>(k, 1));
  for (std::size_t r = 0; r < polys.size(); ++r)
    for (const auto& [mo, c] : polys[r].coeffs) M.at(r, col[mo]) = c;
  return M;
}

// Row-reduced basis for span-membership tests.
struct RowBasis {
  std::map<Monomial, std::size_t> col;
  std::vector<std::vector<u64>> rows;  // echelon rows
  std::vector<std::size_t> pivot;

  bool contains(const SparsePoly& p, const PrimeField& F) const {
    std::vector<u64> v(col.size(), 0);
    for (const auto& [mo, c] : p.coeffs) {
      auto it = col.find(mo);
      if (it == col.end()) return c == 0 ? true : false;
      v[it->second] = c;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      u64 f = v[pivot[r]];
      if (!f) continue;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = F.sub(v[k], F.mul(f, rows[r][k]));
    }
    for (u64 x : v)
      if (x) return false;
    return true;
  }
};

inline RowBasis row_basis(const std::vector<SparsePoly>& polys, const PrimeField& F) {
  RowBasis b;
  for (const auto& p : polys)
    for (const auto& [mo, c] : p.coeffs) b.col.emplace(mo, 0);
  std::size_t k = 0;
  for (auto& [mo, idx] : b.col) idx = k++;
  for (const auto& p : polys) {
    std::vector<u64> v(k, 0);
    for (const auto& [mo, c] : p.coeffs) v[b.col[mo]] = c;
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
      u64 f = v[b.pivot[r]];
      if (!f) continue;
      for (std::size_t t = 0; t < k; ++t) v[t] = F.sub(v[t], F.mul(f, b.rows[r][t]));
    }
    std::size_t piv = k;
    for (std::size_t t = 0; t < k; ++t)
      if (v[t]) {
        piv = t;
        break;
      }
    if (piv == k) continue;
    u64 inv = F.inv(v[piv]);
    for (std::size_t t = 0; t < k; ++t) v[t] = F.mul(v[t], inv);
    b.rows.push_back(std::move(v));
    b.pivot.push_back(piv);
  }
  return b;
}
}  // namespace detail

// Coefficient rank of the polynomials computed at layer s. The bound field is
// left for the caller to fill.
inline LayerRankCertificate layer_rank(const Abp& g, int s, const PrimeField& F,
                                       std::size_t cap = 1000000) {
  detail::LayerPolys lp = detail::layer_polynomials(g, s, F, cap);
  LayerRankCertificate cert;
  cert.layer = s;
  cert.vertex_count = (int)lp.polys.size();
  cert.coeff_rank = (int)rank(detail::coefficient_matrix(lp.polys), F);
  cert.bound = 0;
  cert.holds = cert.vertex_count >= cert.coeff_rank;
  return cert;
}

struct CertifyOptions {
  int trials = 20;
  u64 seed = 0;
  std::size_t cap = 1000000;
};

// Per-layer certificates for the binomial lower bound on column-wise
// multilinear programs claimed to compute det_m or perm_m. The claim is
// PIT-verified first (a certificate for an unverified program is
// meaningless). For each layer s the certificate carries the coefficient
// rank against the bound C(m,s), and span_ok records that every
// sub-determinant/permanent on a row set T (|T| = s, columns 1..s) lies in
// the span of the layer polynomials.
inline std::vector<LayerRankCertificate> certify_binomial_bound(const Abp& g, TargetKind kind,
                                                                int m, const PrimeField& F,
                                                                const CertifyOptions& opt = {}) {
  if (kind == TargetKind::generic) throw Error("certify_binomial_bound needs det or perm target");
  Evaluator lhs = abp_evaluator(g, F);
  Evaluator rhs = kind == TargetKind::det ? det_reference_evaluator(m, F)
                                          : perm_reference_evaluator(m, F);
  PitVerdict v = pit_equal(lhs, rhs, opt.trials, opt.seed, F);
  if (!v.equal)
    throw Error(std::string("certificate refused: program is not PIT-equal to ") +
                to_string(kind) + "_" + std::to_string(m));

  auto layer = *layers_of(g);
  int top = *std::max_element(layer.begin(), layer.end());
  std::vector<LayerRankCertificate> certs;
  std::vector<int> all_rows(m);
  for (int i = 0; i < m; ++i) all_rows[i] = i + 1;
  std::vector<int> prefix_cols;
  for (int s = 0; s <= top; ++s) {
    detail::LayerPolys lp = detail::layer_polynomials(g, s, F, opt.cap);
    LayerRankCertificate cert;
    cert.layer = s;
    cert.vertex_count = (int)lp.polys.size();
    cert.coeff_rank = (int)rank(detail::coefficient_matrix(lp.polys), F);
    cert.bound = binomial(m, s);

    detail::RowBasis basis = detail::row_basis(lp.polys, F);
    cert.span_ok = true;
    std::vector<int> rows;
    auto rec = [&](auto&& self, int start) -> void {
      if ((int)rows.size() == s) {
        if (!basis.contains(subtarget_poly(kind, rows, prefix_cols, F), F)) cert.span_ok = false;
        return;
      }
      if (!cert.span_ok) return;
      for (int r = start; r <= m && (int)rows.size() < s; ++r) {
        rows.push_back(r);
        self(self, r + 1);
        rows.pop_back();
        if (!cert.span_ok) return;
      }
    };
    rec(rec, 1);

    cert.holds = cert.vertex_count >= cert.coeff_rank && cert.coeff_rank >= cert.bound;
    certs.push_back(cert);
    prefix_cols.push_back(s + 1);
  }
  return certs;
}

// Local ("no squeeze") certificate: a declared submatrix (row set, column
// set) whose variables appear only in the first L edge layers forces at
// least C(|other side|, L) vertices at layer L. The side of the submatrix
// with exactly L indices plays the layer role (columns preferred when both
// match, which is the orientation of column-wise programs); monomials are
// the injective assignments from that side into the other. The locality
// precondition is syntactic.
inline LayerRankCertificate certify_nosqueeze(const Abp& g, const std::vector<int>& rows,
                                              const std::vector<int>& cols, int L,
                                              const PrimeField& F, std::size_t cap = 1000000) {
  if (rows.empty() || cols.empty()) throw Error("certify_nosqueeze needs nonempty row/col sets");
  for (int i : rows)
    if (i < 1 || i > g.m) throw Error("row index out of range: " + std::to_string(i));
  for (int j : cols)
    if (j < 1 || j > g.m) throw Error("column index out of range: " + std::to_string(j));
  bool cols_are_prefix;
  if ((int)cols.size() == L)
    cols_are_prefix = true;
  else if ((int)rows.size() == L)
    cols_are_prefix = false;
  else
    throw Error("certify_nosqueeze: neither side of the submatrix has exactly prefix_layers indices");

  std::set<VarId> sub_vars;
  for (int i : rows)
    for (int j : cols) sub_vars.insert(matrix_var(i, j));

  auto layer = layers_of(g);
  if (!layer) throw Error("certify_nosqueeze needs a layered ABP");
  std::set<int> offending;
  for (const auto& e : g.edges) {
    int edge_layer = (*layer)[e.from] + 1;  // edges between layers t-1 and t belong to A_t
    if (edge_layer <= L) continue;
    for (const auto& [v, c] : e.label.terms)
      if (sub_vars.count(v)) offending.insert(edge_layer);
  }
  if (!offending.empty()) {
    std::string msg = "submatrix variables appear beyond layer " + std::to_string(L) + "; layers:";
    for (int t : offending) msg += " " + std::to_string(t);
    throw Error(msg);
  }

  const std::vector<int>& prefix = cols_are_prefix ? cols : rows;
  const std::vector<int>& other = cols_are_prefix ? rows : cols;

  // Restrict to monomials using each prefix index once, with distinct
  // partners from the other side.
  std::set<Monomial> wanted;
  std::vector<int> pick;
  std::vector<bool> used(other.size(), false);
  auto rec = [&](auto&& self, std::size_t slot) -> void {
    if (slot == prefix.size()) {
      std::vector<VarId> vars;
      for (std::size_t t = 0; t < prefix.size(); ++t)
        vars.push_back(cols_are_prefix ? matrix_var(pick[t], prefix[t])
                                       : matrix_var(prefix[t], pick[t]));
      wanted.insert(make_monomial(std::move(vars)));
      return;
    }
    for (std::size_t u = 0; u < other.size(); ++u) {
      if (used[u]) continue;
      used[u] = true;
      pick.push_back(other[u]);
      self(self, slot + 1);
      pick.pop_back();
      used[u] = false;
    }
  };
  rec(rec, 0);

  detail::LayerPolys lp = detail::layer_polynomials(g, L, F, cap);
  std::vector<SparsePoly> restricted;
  for (const auto& p : lp.polys) {
    SparsePoly q;
    for (const auto& [mo, c] : p.coeffs)
      if (wanted.count(mo)) q.coeffs.emplace(mo, c);
    restricted.push_back(std::move(q));
  }

  LayerRankCertificate cert;
  cert.layer = L;
  cert.vertex_count = (int)lp.polys.size();
  cert.coeff_rank = (int)rank(detail::coefficient_matrix(restricted), F);
  cert.bound = binomial((int)other.size(), L);
  cert.holds = cert.vertex_count >= cert.coeff_rank && cert.coeff_rank >= cert.bound;
  return cert;
}

}  // namespace abpdet

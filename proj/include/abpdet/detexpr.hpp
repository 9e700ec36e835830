#pragma once

#include <array>
#include <optional>
#include <set>

#include "abpdet/abp.hpp"
#include "abpdet/matrix.hpp"

namespace abpdet {

// Determinantal expression det(Lambda + sum y^{i,j} X^{i,j}) of size n over
// the m x m variable matrix. Coefficient matrices are stored for the
// variables that actually occur; absent variables have the zero matrix.
struct DetExpr {
  int n = 0;
  int m = 0;
  TargetKind target = TargetKind::generic;
  ScalarMatrix lambda;
  std::map<VarId, ScalarMatrix> coeff;

  friend bool operator==(const DetExpr&, const DetExpr&) = default;
};

// Lambda + sum y X as a matrix of affine forms.
inline AffineMatrix assemble(const DetExpr& e) {
  AffineMatrix A(e.n, e.n);
  for (int i = 0; i < e.n; ++i)
    for (int j = 0; j < e.n; ++j) A.at(i, j).constant = e.lambda.at(i, j);
  for (const auto& [v, X] : e.coeff)
    for (int i = 0; i < e.n; ++i)
      for (int j = 0; j < e.n; ++j)
        if (u64 c = X.at(i, j); c != 0) A.at(i, j).terms[v] = c;
  return A;
}

inline u64 evaluate(const DetExpr& e, const Assignment& a, const PrimeField& F) {
  ScalarMatrix M = e.lambda;
  for (const auto& [v, X] : e.coeff) M = mat_add_scaled(M, X, a.at(v), F);
  return det(std::move(M), F);
}

inline SparsePoly expand_symbolic(const DetExpr& e, const PrimeField& F,
                                  std::size_t cap = 1000000) {
  return det_symbolic(assemble(e), F, cap);
}

inline Evaluator detexpr_evaluator(const DetExpr& e, const PrimeField& F) {
  std::vector<VarId> universe;
  for (const auto& [v, X] : e.coeff) universe.push_back(v);
  return Evaluator{std::move(universe), e.n,
                   [e, &F](const Assignment& a) { return evaluate(e, a, F); }};
}

// Standard Lambda: identity with the (1,1) entry zeroed.
inline ScalarMatrix standard_lambda(int n) {
  ScalarMatrix E = ScalarMatrix::identity(n);
  E.at(0, 0) = 0;
  return E;
}

inline bool is_standard(const DetExpr& e) { return e.lambda == standard_lambda(e.n); }

struct AbpToDetResult {
  DetExpr expr;
  int sign = 1;  // sign * det(A) equals the program's polynomial
};

// From a layered ABP to a determinantal expression: identify source and sink
// into a root vertex (listed first; the rest follow in (layer, construction)
// order), add a loop labeled 1 at every non-root vertex, and take the
// adjacency matrix A with A[target][source] entries. A cycle cover of that
// graph is one root cycle (an s->t path of length k, sign (-1)^{k-1}) plus
// loops, so sign * det(A) = value with sign = +1 iff k is odd.
inline AbpToDetResult abp_to_detexpr(const Abp& g, const PrimeField& F) {
  auto layer = layers_of(g);
  if (!layer) throw Error("abp_to_detexpr needs a layered ABP");
  if (is_canonical_zero(g)) throw Error("abp_to_detexpr: zero program has no expression");
  int nverts = g.size();
  int path_len = (*layer)[g.sink];

  std::vector<int> order;
  order.push_back(g.source);
  std::vector<int> rest;
  for (int v = 0; v < nverts; ++v)
    if (v != g.source && v != g.sink) rest.push_back(v);
  std::stable_sort(rest.begin(), rest.end(),
                   [&](int a, int b) { return (*layer)[a] < (*layer)[b]; });
  order.insert(order.end(), rest.begin(), rest.end());

  std::vector<int> pos(nverts, -1);
  for (int i = 0; i < (int)order.size(); ++i) pos[order[i]] = i;
  pos[g.sink] = 0;  // identified with the source

  DetExpr e;
  e.n = nverts - 1;
  e.m = g.m;
  e.lambda = ScalarMatrix(e.n, e.n);
  for (int i = 1; i < e.n; ++i) e.lambda.at(i, i) = 1;
  for (const auto& edge : g.edges) {
    int r = pos[edge.to], c = pos[edge.from];
    if (edge.label.constant != 0)
      e.lambda.at(r, c) = F.add(e.lambda.at(r, c), edge.label.constant);
    for (const auto& [v, co] : edge.label.terms) {
      auto it = e.coeff.find(v);
      if (it == e.coeff.end()) it = e.coeff.emplace(v, ScalarMatrix(e.n, e.n)).first;
      it->second.at(r, c) = F.add(it->second.at(r, c), co);
    }
  }
  return AbpToDetResult{std::move(e), path_len % 2 == 1 ? 1 : -1};
}

struct ExprProfile {
  int n = 0;
  bool is_regular = false;
  bool is_standard = false;
  std::size_t lambda_rank = 0;
  std::map<VarId, std::size_t> rank_per_var;
  std::map<VarId, std::size_t> read_per_var;
  std::size_t max_rank = 0;
  std::size_t max_read = 0;
};

inline ExprProfile profile(const DetExpr& e, const PrimeField& F) {
  ExprProfile p;
  p.n = e.n;
  p.lambda_rank = rank(e.lambda, F);
  p.is_regular = p.lambda_rank == (std::size_t)e.n - 1;
  p.is_standard = is_standard(e);
  for (const auto& [v, X] : e.coeff) {
    std::size_t rk = rank(X, F);
    std::size_t rd = X.nonzero_count();
    p.rank_per_var[v] = rk;
    p.read_per_var[v] = rd;
    p.max_rank = std::max(p.max_rank, rk);
    p.max_read = std::max(p.max_read, rd);
  }
  return p;
}

struct StandardizeResult {
  DetExpr expr;
  u64 scalar_factor = 1;  // det(A') = scalar_factor * det(A); 1 when folded
  ScalarMatrix P, Q;      // the recorded transforms: A' = P * A * Q entrywise
};

// Normalize a regular expression so Lambda becomes the identity with the
// (1,1) entry zeroed. Computes invertible P, Q with P*Lambda*Q standard by
// full-pivot Gauss-Jordan, applies them to every coefficient matrix, and by
// default folds det(P)det(Q) away by rescaling the first row (whose Lambda
// part is zero), so the represented polynomial is preserved exactly.
inline StandardizeResult standardize(const DetExpr& e, const PrimeField& F, bool fold = true) {
  std::size_t n = (std::size_t)e.n;
  if (rank(e.lambda, F) != n - 1) throw Error("standardize needs a regular expression");
  if (is_standard(e)) return {e, 1, ScalarMatrix::identity(n), ScalarMatrix::identity(n)};

  ScalarMatrix M = e.lambda;
  ScalarMatrix P = ScalarMatrix::identity(n), Q = ScalarMatrix::identity(n);
  auto swap_rows = [](ScalarMatrix& X, std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < X.cols; ++k) std::swap(X.at(a, k), X.at(b, k));
  };
  auto swap_cols = [](ScalarMatrix& X, std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < X.rows; ++k) std::swap(X.at(k, a), X.at(k, b));
  };

  std::size_t r = 0;
  for (; r < n; ++r) {
    std::size_t pr = n, pc = n;
    for (std::size_t i = r; i < n && pr == n; ++i)
      for (std::size_t j = r; j < n; ++j)
        if (M.at(i, j) != 0) {
          pr = i;
          pc = j;
          break;
        }
    if (pr == n) break;
    if (pr != r) {
      swap_rows(M, pr, r);
      swap_rows(P, pr, r);
    }
    if (pc != r) {
      swap_cols(M, pc, r);
      swap_cols(Q, pc, r);
    }
    u64 inv = F.inv(M.at(r, r));
    for (std::size_t k = 0; k < n; ++k) {
      M.at(r, k) = F.mul(M.at(r, k), inv);
      P.at(r, k) = F.mul(P.at(r, k), inv);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r) continue;
      u64 f = M.at(i, r);
      if (!f) continue;
      for (std::size_t k = 0; k < n; ++k) {
        M.at(i, k) = F.sub(M.at(i, k), F.mul(f, M.at(r, k)));
        P.at(i, k) = F.sub(P.at(i, k), F.mul(f, P.at(r, k)));
      }
    }
    // clear the rest of row r by column operations
    for (std::size_t j = 0; j < n; ++j) {
      if (j == r) continue;
      u64 f = M.at(r, j);
      if (!f) continue;
      for (std::size_t k = 0; k < n; ++k) {
        M.at(k, j) = F.sub(M.at(k, j), F.mul(f, M.at(k, r)));
        Q.at(k, j) = F.sub(Q.at(k, j), F.mul(f, Q.at(k, r)));
      }
    }
  }
  if (r != n - 1) throw Error("standardize: rank changed during elimination");

  // M = diag(1,...,1,0); move the zero to the front.
  swap_rows(M, 0, n - 1);
  swap_rows(P, 0, n - 1);
  swap_cols(M, 0, n - 1);
  swap_cols(Q, 0, n - 1);
  if (M != standard_lambda((int)n)) throw Error("standardize: normal form not reached");

  DetExpr out;
  out.n = e.n;
  out.m = e.m;
  out.target = e.target;
  out.lambda = std::move(M);
  for (const auto& [v, X] : e.coeff) out.coeff.emplace(v, mat_mul(mat_mul(P, X, F), Q, F));

  u64 factor = F.mul(det(P, F), det(Q, F));
  if (fold && factor != 1) {
    // Lambda's first row is zero, so rescaling row 1 touches variables only.
    u64 inv = F.inv(factor);
    for (auto& [v, X] : out.coeff)
      for (std::size_t j = 0; j < n; ++j) X.at(0, j) = F.mul(X.at(0, j), inv);
    for (std::size_t j = 0; j < n; ++j) P.at(0, j) = F.mul(P.at(0, j), inv);
    factor = 1;
  }
  return {std::move(out), factor, std::move(P), std::move(Q)};
}

// Determinant-preserving operations from the group fixing det_n and a
// standard Lambda. Indices are 1-based; conjugations need 2 <= i,j <= n.
struct GroupOp {
  enum Kind { first_column, first_row, permutation_conjugation, elimination_conjugation } kind;
  u64 alpha = 0;
  int i = 0, j = 0;
};

inline DetExpr apply_group_op(const DetExpr& e, const GroupOp& op, const PrimeField& F) {
  int n = e.n;
  auto in_range = [&](int k) { return k >= 2 && k <= n; };
  DetExpr out = e;
  auto for_each_matrix = [&](auto&& f) {
    f(out.lambda);
    for (auto& [v, X] : out.coeff) f(X);
  };
  switch (op.kind) {
    case GroupOp::first_column: {
      if (!in_range(op.j)) throw Error("first_column needs 2 <= j <= n");
      std::size_t j = (std::size_t)op.j - 1;
      for_each_matrix([&](ScalarMatrix& X) {
        for (std::size_t r = 0; r < (std::size_t)n; ++r)
          X.at(r, j) = F.add(X.at(r, j), F.mul(op.alpha, X.at(r, 0)));
      });
      break;
    }
    case GroupOp::first_row: {
      if (!in_range(op.j)) throw Error("first_row needs 2 <= j <= n");
      std::size_t j = (std::size_t)op.j - 1;
      for_each_matrix([&](ScalarMatrix& X) {
        for (std::size_t c = 0; c < (std::size_t)n; ++c)
          X.at(j, c) = F.add(X.at(j, c), F.mul(op.alpha, X.at(0, c)));
      });
      break;
    }
    case GroupOp::permutation_conjugation: {
      if (!in_range(op.i) || !in_range(op.j) || op.i == op.j)
        throw Error("permutation_conjugation needs distinct 2 <= i,j <= n");
      std::size_t a = (std::size_t)op.i - 1, b = (std::size_t)op.j - 1;
      for_each_matrix([&](ScalarMatrix& X) {
        for (std::size_t k = 0; k < (std::size_t)n; ++k) std::swap(X.at(a, k), X.at(b, k));
        for (std::size_t k = 0; k < (std::size_t)n; ++k) std::swap(X.at(k, a), X.at(k, b));
      });
      break;
    }
    case GroupOp::elimination_conjugation: {
      if (!in_range(op.i) || !in_range(op.j) || op.i == op.j)
        throw Error("elimination_conjugation needs distinct 2 <= i,j <= n");
      std::size_t i = (std::size_t)op.i - 1, j = (std::size_t)op.j - 1;
      for_each_matrix([&](ScalarMatrix& X) {
        // R_j += alpha R_i, then C_i -= alpha C_j.
        for (std::size_t k = 0; k < (std::size_t)n; ++k)
          X.at(j, k) = F.add(X.at(j, k), F.mul(op.alpha, X.at(i, k)));
        for (std::size_t k = 0; k < (std::size_t)n; ++k)
          X.at(k, i) = F.sub(X.at(k, i), F.mul(op.alpha, X.at(k, j)));
      });
      break;
    }
  }
  return out;
}

struct LemmaReport {
  bool prop_I = false;
  bool prop_II = false;
  int prop_III_col = 0;  // distinct nonzero affine entries in the first column
  int prop_III_row = 0;
  int prop_III_col_up_to_scale = 0;  // same counts with forms identified up to scalar
  int prop_III_row_up_to_scale = 0;
};

// Checks properties (I)-(III) of a standard expression: (I) the (1,1) entry
// vanishes identically, (II) sum_{j>=2} A_{1,j} A_{j,1} = 0 as a polynomial
// (checked by exact degree-2 expansion, not sampling), (III) counts of
// distinct nonzero affine entries in the first column/row.
inline LemmaReport check_lemma_properties(const DetExpr& e, const PrimeField& F) {
  if (!is_standard(e)) throw Error("check_lemma_properties needs a standard expression");
  AffineMatrix A = assemble(e);
  LemmaReport rep;
  rep.prop_I = A.at(0, 0).is_zero();

  SparsePoly sum;
  for (int j = 1; j < e.n; ++j)
    poly_add_in_place(sum, poly_mul_affine(poly_from_affine(A.at(0, j)), A.at(j, 0), F, 1 << 20),
                      F, 1 << 20);
  rep.prop_II = sum.is_zero();

  auto scale_normal = [&](const AffineForm& f) {
    u64 lead = f.constant != 0 ? f.constant : f.terms.begin()->second;
    return af_scale(f, F.inv(lead), F);
  };
  auto count_distinct = [&](bool column) {
    std::set<AffineForm> forms, scaled;
    for (int k = 0; k < e.n; ++k) {
      const AffineForm& f = column ? A.at(k, 0) : A.at(0, k);
      if (f.is_zero()) continue;
      forms.insert(f);
      scaled.insert(scale_normal(f));
    }
    return std::make_pair((int)forms.size(), (int)scaled.size());
  };
  std::tie(rep.prop_III_col, rep.prop_III_col_up_to_scale) = count_distinct(true);
  std::tie(rep.prop_III_row, rep.prop_III_row_up_to_scale) = count_distinct(false);
  return rep;
}

struct MonomialWitness {
  std::array<int, 3> pi;  // permutation of the three monomial slots
  int k = 0, l = 0;       // 1-based positions, 2 <= k,l <= n, k != l
};

// For a degree-3 monomial appearing in det(A) of a standard expression, finds
// (pi, k, l) with X^{pi(1)} nonzero at (k,1), X^{pi(2)} at (1,l), X^{pi(3)} at
// (l,k). Search is exhaustive, first hit in lexicographic (pi, k, l) order;
// the lemma guarantees a witness exists, so none on valid input means the
// construction or the checker is broken.
inline std::optional<MonomialWitness> find_monomial_witness(const DetExpr& e,
                                                            const std::array<VarId, 3>& monomial,
                                                            const PrimeField& F,
                                                            std::size_t cap = 1000000) {
  if (!is_standard(e)) throw Error("find_monomial_witness needs a standard expression");
  // Presence check: restrict to the three variables and expand exactly.
  DetExpr restricted = e;
  restricted.coeff.clear();
  for (VarId v : monomial) {
    auto it = e.coeff.find(v);
    if (it != e.coeff.end()) restricted.coeff.emplace(v, it->second);
  }
  Monomial key = make_monomial({monomial[0], monomial[1], monomial[2]});
  if (coefficient_of(expand_symbolic(restricted, F, cap), key) == 0)
    throw Error("monomial not in polynomial");

  auto entry = [&](VarId v, int r, int c) -> u64 {
    auto it = e.coeff.find(v);
    return it == e.coeff.end() ? 0 : it->second.at(r, c);
  };
  std::array<int, 3> pi = {0, 1, 2};
  std::sort(pi.begin(), pi.end());
  do {
    for (int k = 2; k <= e.n; ++k) {
      if (entry(monomial[pi[0]], k - 1, 0) == 0) continue;
      for (int l = 2; l <= e.n; ++l) {
        if (l == k) continue;
        if (entry(monomial[pi[1]], 0, l - 1) != 0 && entry(monomial[pi[2]], l - 1, k - 1) != 0)
          return MonomialWitness{pi, k, l};
      }
    }
  } while (std::next_permutation(pi.begin(), pi.end()));
  return std::nullopt;
}

// Restriction P_m -> P_{m-1}: zero the last row and column variables except
// y^{m,m}, substitute a sampled y0 for y^{m,m} keeping rank(Lambda + y0 X)
// = n-1, absorb it into Lambda, and rescale the first row by 1/y0.
inline DetExpr restrict_to_smaller(const DetExpr& e, u64 seed, const PrimeField& F) {
  if (e.target == TargetKind::generic)
    throw Error("restrict needs a det or perm target expression");
  if (e.m < 2) throw Error("restrict needs m >= 2");
  std::size_t n = (std::size_t)e.n;
  if (rank(e.lambda, F) != n - 1) throw Error("restrict needs a regular expression");

  ScalarMatrix Xmm(n, n);
  if (auto it = e.coeff.find(matrix_var(e.m, e.m)); it != e.coeff.end()) Xmm = it->second;

  u64 y0 = 0;
  bool found = false;
  for (u64 attempt = 0; attempt < 16 && !found; ++attempt) {
    SplitMix64 gen = derive_stream(seed, attempt);
    u64 cand = uniform_nonzero(gen, F);
    if (rank(mat_add_scaled(e.lambda, Xmm, cand, F), F) == n - 1) {
      y0 = cand;
      found = true;
    }
  }
  if (!found) throw Error("restrict: no admissible value for y^{m,m} in 16 seeded draws");

  DetExpr out;
  out.n = e.n;
  out.m = e.m - 1;
  out.target = e.target;
  out.lambda = mat_add_scaled(e.lambda, Xmm, y0, F);
  u64 inv = F.inv(y0);
  for (std::size_t j = 0; j < n; ++j) out.lambda.at(0, j) = F.mul(out.lambda.at(0, j), inv);
  for (const auto& [v, X] : e.coeff) {
    if ((int)v.row == e.m || (int)v.col == e.m) continue;  // set to zero
    ScalarMatrix Y = X;
    for (std::size_t j = 0; j < n; ++j) Y.at(0, j) = F.mul(Y.at(0, j), inv);
    out.coeff.emplace(v, std::move(Y));
  }
  return out;
}

}  // namespace abpdet

#pragma once

#include <map>
#include <set>
#include <vector>

#include "abpdet/abp.hpp"
#include "abpdet/matrix.hpp"

namespace abpdet {

// Homogeneous iterated matrix multiplication in product form: linear-form
// matrices A_1..A_L with boundary dimension 1; the value is the 1x1 product
// A_L * ... * A_1. shapes holds n_1..n_L (n_1 = 1); the final boundary
// dimension n_{L+1} = 1 is implicit. mats[s] maps level s to level s+1, so it
// has next_dim(s) rows and shapes[s] columns; entries are stored sparsely.
struct HimmExpr {
  int m = 0;  // variable universe y^{i,j}
  std::vector<int> shapes;
  std::vector<std::map<std::pair<int, int>, AffineForm>> mats;

  int degree() const { return (int)mats.size(); }
  int size() const {
    int s = 0;
    for (int x : shapes) s += x;
    return s;
  }
  int next_dim(std::size_t s) const { return s + 1 < shapes.size() ? shapes[s + 1] : 1; }

  friend bool operator==(const HimmExpr&, const HimmExpr&) = default;
};

inline void validate_himm(const HimmExpr& h) {
  if (h.shapes.empty() || h.shapes[0] != 1) throw Error("himm needs shapes n_1..n_L with n_1 = 1");
  for (int s : h.shapes)
    if (s < 1) throw Error("himm level dimensions must be positive");
  if (h.mats.size() != h.shapes.size()) throw Error("himm needs one matrix per level");
  for (std::size_t s = 0; s < h.mats.size(); ++s)
    for (const auto& [rc, f] : h.mats[s]) {
      if (rc.first < 0 || rc.first >= h.next_dim(s) || rc.second < 0 || rc.second >= h.shapes[s])
        throw Error("himm entry out of range");
      if (!f.is_linear() || f.is_zero())
        throw Error("himm entries must be nonzero homogeneous linear forms");
    }
}

// Trace form: square affine matrices B_1..B_L, value trace(B_L ... B_1).
struct ImmExpr {
  int n = 0;
  int m = 0;
  std::vector<AffineMatrix> mats;

  friend bool operator==(const ImmExpr&, const ImmExpr&) = default;
};

inline u64 evaluate(const HimmExpr& h, const Assignment& a, const PrimeField& F) {
  validate_himm(h);
  std::vector<u64> vec{1};  // level-1 state (dimension n_1 = 1)
  for (std::size_t s = 0; s < h.mats.size(); ++s) {
    std::vector<u64> next(h.next_dim(s), 0);
    for (const auto& [rc, f] : h.mats[s]) {
      u64 x = vec[rc.second];
      if (x) next[rc.first] = F.add(next[rc.first], F.mul(x, eval_affine(f, a, F)));
    }
    vec = std::move(next);
  }
  return vec[0];
}

inline SparsePoly expand_symbolic(const HimmExpr& h, const PrimeField& F,
                                  std::size_t cap = 1000000) {
  validate_himm(h);
  std::vector<SparsePoly> vec(1);
  vec[0].coeffs.emplace(Monomial{}, 1);
  for (std::size_t s = 0; s < h.mats.size(); ++s) {
    std::vector<SparsePoly> next(h.next_dim(s));
    for (const auto& [rc, f] : h.mats[s])
      poly_add_in_place(next[rc.first], poly_mul_affine(vec[rc.second], f, F, cap), F, cap);
    vec = std::move(next);
  }
  return vec[0];
}

inline u64 evaluate(const ImmExpr& e, const Assignment& a, const PrimeField& F) {
  ScalarMatrix acc = ScalarMatrix::identity(e.n);
  for (const AffineMatrix& B : e.mats) acc = mat_mul(eval_matrix(B, a, F), acc, F);
  u64 tr = 0;
  for (int i = 0; i < e.n; ++i) tr = F.add(tr, acc.at(i, i));
  return tr;
}

inline Evaluator himm_evaluator(const HimmExpr& h, const PrimeField& F) {
  return Evaluator{matrix_universe(h.m), h.degree(),
                   [h, &F](const Assignment& a) { return evaluate(h, a, F); }};
}

inline Evaluator imm_evaluator(const ImmExpr& e, const PrimeField& F) {
  return Evaluator{matrix_universe(e.m), (int)e.mats.size(),
                   [e, &F](const Assignment& a) { return evaluate(e, a, F); }};
}

namespace detail {
inline std::string level_vertex_name(int level, int index) {
  return "L" + std::to_string(level) + ":" + std::to_string(index);
}
}  // namespace detail

// Degree-layered ABP of size himm-size + 1: n_j vertices at level j, one sink,
// edges labeled by the matrix entries.
inline Abp himm_to_dlabp(const HimmExpr& h, const PrimeField& F) {
  validate_himm(h);
  AbpBuilder b(h.m, 0, F);
  std::vector<std::vector<int>> ids(h.shapes.size() + 1);
  for (std::size_t s = 0; s < h.shapes.size(); ++s)
    for (int k = 0; k < h.shapes[s]; ++k)
      ids[s].push_back(b.add_vertex(detail::level_vertex_name((int)s + 1, k)));
  ids.back().push_back(b.add_vertex("sink"));
  b.set_source(ids[0][0]);
  b.set_sink(ids.back()[0]);
  for (std::size_t s = 0; s < h.mats.size(); ++s)
    for (const auto& [rc, f] : h.mats[s]) b.add_edge(ids[s][rc.second], ids[s + 1][rc.first], f);
  return b.build();
}

// Inverse read-off: one matrix per edge layer of a degree-layered ABP.
inline HimmExpr dlabp_to_himm(const Abp& g) {
  AbpReport rep = validate(g);
  if (!rep.is_degree_layered || rep.is_canonical_zero)
    throw Error("dlabp_to_himm needs a degree-layered ABP");
  auto layer = *layers_of(g);
  int L = *std::max_element(layer.begin(), layer.end());

  // Vertex order within a layer follows the ABP's own vertex order.
  std::vector<std::vector<int>> by_layer(L + 1);
  for (int v = 0; v < g.size(); ++v) by_layer[layer[v]].push_back(v);
  std::vector<int> pos(g.size(), -1);
  for (auto& lay : by_layer)
    for (std::size_t k = 0; k < lay.size(); ++k) pos[lay[k]] = (int)k;

  HimmExpr h;
  h.m = g.m;
  for (int s = 0; s < L; ++s) h.shapes.push_back((int)by_layer[s].size());
  h.mats.resize(L);
  for (const auto& e : g.edges) {
    int s = layer[e.from];
    h.mats[s][{pos[e.to], pos[e.from]}] = e.label;
  }
  validate_himm(h);
  return h;
}

// Trace-form conversion for a layered ABP with k edge layers: identify source
// and sink into a root (index 0), and let B_j carry the labels between layers
// j-1 and j. The product B_k...B_1 is supported on the (root, root) entry
// alone, so its trace is the program's value with no stray diagonal terms.
inline ImmExpr labp_to_imm(const Abp& g, const PrimeField& F) {
  auto layer_opt = layers_of(g);
  if (!layer_opt || is_canonical_zero(g)) throw Error("labp_to_imm needs a layered ABP");
  auto layer = *layer_opt;
  int k = layer[g.sink];

  std::vector<int> order{g.source};
  for (int v = 0; v < g.size(); ++v)
    if (v != g.source && v != g.sink) order.push_back(v);
  std::stable_sort(order.begin() + 1, order.end(),
                   [&](int a, int b) { return layer[a] < layer[b]; });
  std::vector<int> pos(g.size(), -1);
  for (int i = 0; i < (int)order.size(); ++i) pos[order[i]] = i;
  pos[g.sink] = 0;

  ImmExpr e;
  e.n = g.size() - 1;
  e.m = g.m;
  e.mats.assign(k, AffineMatrix(e.n, e.n));
  for (const auto& edge : g.edges) {
    int j = layer[edge.from];  // edge layer j+1 in 1-based terms
    AffineForm& slot = e.mats[j].at(pos[edge.to], pos[edge.from]);
    slot = af_add(slot, edge.label, F);
  }
  return e;
}

// Matrix-powering form of a degree-layered ABP with k edge layers: the
// adjacency matrix of the identified graph, with the root's outgoing labels
// scaled by 1/k. Every closed length-k walk passes the root exactly once and
// is counted once per basepoint, so the scaling makes trace(A^k) equal the
// program's value exactly.
inline AffineMatrix to_matrix_power(const Abp& g, const PrimeField& F) {
  AbpReport rep = validate(g);
  if (!rep.is_degree_layered || rep.is_canonical_zero)
    throw Error("to_matrix_power needs a degree-layered ABP");
  auto layer = *layers_of(g);
  int k = layer[g.sink];

  std::vector<int> order{g.source};
  for (int v = 0; v < g.size(); ++v)
    if (v != g.source && v != g.sink) order.push_back(v);
  std::stable_sort(order.begin() + 1, order.end(),
                   [&](int a, int b) { return layer[a] < layer[b]; });
  std::vector<int> pos(g.size(), -1);
  for (int i = 0; i < (int)order.size(); ++i) pos[order[i]] = i;
  pos[g.sink] = 0;

  AffineMatrix A(g.size() - 1, g.size() - 1);
  u64 invk = F.inv(F.from_int(k));
  for (const auto& edge : g.edges) {
    AffineForm lab = edge.from == g.source ? af_scale(edge.label, invk, F) : edge.label;
    A.at(pos[edge.to], pos[edge.from]) = af_add(A.at(pos[edge.to], pos[edge.from]), lab, F);
  }
  return A;
}

inline u64 evaluate_power(const AffineMatrix& A, int power, const Assignment& a,
                          const PrimeField& F) {
  ScalarMatrix M = eval_matrix(A, a, F);
  ScalarMatrix acc = ScalarMatrix::identity(A.rows);
  for (int i = 0; i < power; ++i) acc = mat_mul(M, acc, F);
  u64 tr = 0;
  for (std::size_t i = 0; i < acc.rows; ++i) tr = F.add(tr, acc.at(i, i));
  return tr;
}

// Variable grouping (a partition of the universe) for block-multilinearity.
struct Grouping {
  std::vector<std::vector<VarId>> groups;

  static Grouping column_wise(int m) {
    Grouping g;
    for (int j = 1; j <= m; ++j) {
      std::vector<VarId> col;
      for (int i = 1; i <= m; ++i) col.push_back(matrix_var(i, j));
      g.groups.push_back(std::move(col));
    }
    return g;
  }

  static Grouping row_wise(int m) {
    Grouping g;
    for (int i = 1; i <= m; ++i) {
      std::vector<VarId> row;
      for (int j = 1; j <= m; ++j) row.push_back(matrix_var(i, j));
      g.groups.push_back(std::move(row));
    }
    return g;
  }
};

struct MultilinearViolation {
  int s = 0;       // 1-based matrix index
  int row = 0, col = 0;
  std::vector<int> groups;  // 1-based group indices the matrix touches
};

struct MultilinearReport {
  bool ok = true;
  std::vector<MultilinearViolation> violations;
};

// ok iff every matrix references variables of exactly one group.
inline MultilinearReport check_block_multilinear(const HimmExpr& h, const Grouping& grp) {
  validate_himm(h);
  std::map<VarId, int> group_of;
  for (std::size_t gi = 0; gi < grp.groups.size(); ++gi)
    for (VarId v : grp.groups[gi]) group_of[v] = (int)gi + 1;

  MultilinearReport rep;
  for (std::size_t s = 0; s < h.mats.size(); ++s) {
    std::set<int> touched;
    for (const auto& [rc, f] : h.mats[s])
      for (const auto& [v, c] : f.terms) {
        auto it = group_of.find(v);
        if (it == group_of.end()) throw Error("variable outside the grouping: " + to_string(v));
        touched.insert(it->second);
      }
    if (touched.size() == 1) continue;
    rep.ok = false;
    if (touched.empty()) {
      rep.violations.push_back({(int)s + 1, -1, -1, {}});
      continue;
    }
    int primary = *touched.begin();
    for (const auto& [rc, f] : h.mats[s])
      for (const auto& [v, c] : f.terms)
        if (group_of[v] != primary) {
          rep.violations.push_back({(int)s + 1, rc.first, rc.second,
                                    std::vector<int>(touched.begin(), touched.end())});
          break;
        }
  }
  return rep;
}

// Column-wise multilinear product-form program for perm_m of size 2^m - 1.
// Level s+1 is indexed by the s-element subsets S of rows (lexicographic);
// the step consuming column s+1 has entry y^{i,s+1} at (S + {i}, S). Subsets
// index rows rather than columns (perm is transpose-invariant), which is what
// makes every matrix reference a single column.
inline HimmExpr grenet_perm(int m) {
  if (m < 1 || m > 20) throw Error("grenet_perm supports 1 <= m <= 20");
  auto subsets_of_size = [m](int s) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
      if ((int)cur.size() == s) {
        out.push_back(cur);
        return;
      }
      for (int v = start; v <= m; ++v) {
        cur.push_back(v);
        self(self, v + 1);
        cur.pop_back();
      }
    };
    rec(rec, 1);
    return out;
  };

  HimmExpr h;
  h.m = m;
  h.mats.resize(m);
  std::vector<std::vector<int>> cur = subsets_of_size(0);
  for (int s = 0; s < m; ++s) {
    h.shapes.push_back((int)cur.size());
    std::vector<std::vector<int>> next = subsets_of_size(s + 1);
    std::map<std::vector<int>, int> index;
    for (std::size_t k = 0; k < next.size(); ++k) index[next[k]] = (int)k;
    for (std::size_t c = 0; c < cur.size(); ++c) {
      std::set<int> have(cur[c].begin(), cur[c].end());
      for (int i = 1; i <= m; ++i) {
        if (have.count(i)) continue;
        std::vector<int> tgt = cur[c];
        tgt.insert(std::lower_bound(tgt.begin(), tgt.end(), i), i);
        h.mats[s][{index[tgt], (int)c}] = af_var(matrix_var(i, s + 1));
      }
    }
    cur = std::move(next);
  }
  validate_himm(h);
  return h;
}

}  // namespace abpdet

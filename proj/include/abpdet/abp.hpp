#pragma once

#include <algorithm>
#include <bitset>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abpdet/pit.hpp"
#include "abpdet/poly.hpp"

namespace abpdet {

// Algebraic branching program: a DAG with one source and one sink whose edges
// carry affine forms. Parallel edges are merged (their labels sum) and
// vertices off every source->sink path are pruned at build time, so a built
// value satisfies the structural invariants checked by validate().
struct AbpEdge {
  int from = -1, to = -1;
  AffineForm label;

  friend bool operator==(const AbpEdge&, const AbpEdge&) = default;
};

struct Abp {
  int m = 0;             // matrix variable universe y^{i,j}, 1 <= i,j <= m
  int generic_vars = 0;  // optional extra universe z_1..z_G
  std::vector<std::string> names;
  int source = -1, sink = -1;
  std::vector<AbpEdge> edges;

  int size() const { return (int)names.size(); }

  std::vector<VarId> universe() const {
    std::vector<VarId> u = matrix_universe(m);
    for (int k = 1; k <= generic_vars; ++k) u.push_back(generic_var(k));
    return u;
  }

  friend bool operator==(const Abp&, const Abp&) = default;
};

struct ValidationError : Error {
  std::vector<std::string> offenders;
  ValidationError(const std::string& msg, std::vector<std::string> who = {})
      : Error(msg), offenders(std::move(who)) {}
};

struct AbpReport {
  int size = 0;
  bool is_layered = false;
  bool is_homogeneous = false;
  bool is_degree_layered = false;
  bool is_canonical_zero = false;
  std::vector<int> layer_profile;
  int degree = 0;
};

namespace detail {
// Topological order; throws listing vertices on cycles.
inline std::vector<int> topo_order(const Abp& g) {
  int n = g.size();
  std::vector<int> indeg(n, 0), order;
  std::vector<std::vector<int>> out(n);
  for (const auto& e : g.edges) {
    out[e.from].push_back(e.to);
    ++indeg[e.to];
  }
  std::vector<int> stack;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) stack.push_back(v);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int w : out[v])
      if (--indeg[w] == 0) stack.push_back(w);
  }
  if ((int)order.size() != n) {
    std::vector<std::string> cyc;
    for (int v = 0; v < n; ++v)
      if (indeg[v] > 0) cyc.push_back(g.names[v]);
    throw ValidationError("ABP contains a cycle through: " + cyc.front(), cyc);
  }
  return order;
}
}  // namespace detail

inline bool is_canonical_zero(const Abp& g) { return g.size() == 2 && g.edges.empty(); }

// Structural report. Layeredness is decided by path-length consistency from
// the source; degree-layered additionally requires every label to be a
// nonzero homogeneous linear form. Homogeneity is the syntactic
// no-cancellation check (the set of path degrees at the sink is a singleton).
inline AbpReport validate(const Abp& g) {
  AbpReport rep;
  rep.size = g.size();
  if (g.size() < 2) throw ValidationError("ABP needs at least source and sink");
  if (g.source < 0 || g.source >= g.size() || g.sink < 0 || g.sink >= g.size() ||
      g.source == g.sink)
    throw ValidationError("ABP needs distinct designated source and sink");

  if (is_canonical_zero(g)) {
    // Canonical zero program: no paths, value 0.
    rep.is_canonical_zero = true;
    rep.is_layered = rep.is_homogeneous = rep.is_degree_layered = true;
    rep.layer_profile = {1, 1};
    return rep;
  }

  int n = g.size();
  std::vector<int> indeg(n, 0), outdeg(n, 0);
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw ValidationError("edge endpoint out of range");
    ++outdeg[e.from];
    ++indeg[e.to];
  }
  std::vector<std::string> extra_sources, extra_sinks;
  for (int v = 0; v < n; ++v) {
    if (indeg[v] == 0 && v != g.source) extra_sources.push_back(g.names[v]);
    if (outdeg[v] == 0 && v != g.sink) extra_sinks.push_back(g.names[v]);
  }
  if (indeg[g.source] != 0) throw ValidationError("designated source has incoming edges");
  if (outdeg[g.sink] != 0) throw ValidationError("designated sink has outgoing edges");
  if (!extra_sources.empty())
    throw ValidationError("ABP has more than one source; offending: " + extra_sources.front(),
                          extra_sources);
  if (!extra_sinks.empty())
    throw ValidationError("ABP has more than one sink; offending: " + extra_sinks.front(),
                          extra_sinks);

  std::vector<int> order = detail::topo_order(g);

  // Layer = distance from source; layered iff consistent on every edge.
  std::vector<int> layer(n, -1);
  layer[g.source] = 0;
  rep.is_layered = true;
  std::vector<std::vector<const AbpEdge*>> in(n);
  for (const auto& e : g.edges) in[e.to].push_back(&e);
  for (int v : order) {
    for (const AbpEdge* e : in[v]) {
      if (layer[e->from] < 0) continue;
      if (layer[v] < 0)
        layer[v] = layer[e->from] + 1;
      else if (layer[v] != layer[e->from] + 1)
        rep.is_layered = false;
    }
  }
  for (int v = 0; v < n; ++v)
    if (layer[v] < 0)
      throw ValidationError("vertex not reachable from source: " + g.names[v], {g.names[v]});

  if (rep.is_layered) {
    int top = *std::max_element(layer.begin(), layer.end());
    rep.layer_profile.assign(top + 1, 0);
    for (int v = 0; v < n; ++v) ++rep.layer_profile[layer[v]];
  }

  // Syntactic degree sets per vertex (bitset over degrees 0..127).
  constexpr int kMaxDeg = 128;
  std::vector<std::bitset<kMaxDeg>> degs(n);
  degs[g.source].set(0);
  for (int v : order) {
    for (const AbpEdge* e : in[v]) {
      const auto& d = degs[e->from];
      if (e->label.constant != 0) degs[v] |= d;
      if (!e->label.terms.empty()) degs[v] |= d << 1;
    }
  }
  rep.is_homogeneous = degs[g.sink].count() == 1;
  for (int d = kMaxDeg - 1; d >= 0; --d)
    if (degs[g.sink].test(d)) {
      rep.degree = d;
      break;
    }

  bool labels_linear = true;
  for (const auto& e : g.edges)
    if (!e.label.is_linear() || e.label.is_zero()) labels_linear = false;
  rep.is_degree_layered = rep.is_layered && labels_linear;
  return rep;
}

// Layer assignment (source = 0); nullopt if the ABP is not layered.
inline std::optional<std::vector<int>> layers_of(const Abp& g) {
  if (is_canonical_zero(g)) return std::vector<int>{0, 1};
  std::vector<int> order = detail::topo_order(g);
  int n = g.size();
  std::vector<int> layer(n, -1);
  layer[g.source] = 0;
  std::vector<std::vector<const AbpEdge*>> in(n);
  for (const auto& e : g.edges) in[e.to].push_back(&e);
  for (int v : order)
    for (const AbpEdge* e : in[v]) {
      if (layer[e->from] < 0) continue;
      if (layer[v] < 0)
        layer[v] = layer[e->from] + 1;
      else if (layer[v] != layer[e->from] + 1)
        return std::nullopt;
    }
  for (int v = 0; v < n; ++v)
    if (layer[v] < 0) return std::nullopt;
  return layer;
}

// Value at the sink: val(source) = 1, val(v) = sum over in-edges of
// val(from) * label, in topological order.
inline u64 evaluate(const Abp& g, const Assignment& a, const PrimeField& F) {
  if (is_canonical_zero(g)) return 0;
  std::vector<int> order = detail::topo_order(g);
  int n = g.size();
  std::vector<std::vector<const AbpEdge*>> in(n);
  for (const auto& e : g.edges) in[e.to].push_back(&e);
  std::vector<u64> val(n, 0);
  val[g.source] = 1;
  for (int v : order) {
    if (v == g.source) continue;
    u64 acc = 0;
    for (const AbpEdge* e : in[v])
      acc = F.add(acc, F.mul(val[e->from], eval_affine(e->label, a, F)));
    val[v] = acc;
  }
  return val[g.sink];
}

// Polynomials computed at every vertex (same dynamic program, symbolic).
inline std::vector<SparsePoly> all_vertex_polynomials(const Abp& g, const PrimeField& F,
                                                      std::size_t cap = 1000000) {
  int n = g.size();
  std::vector<SparsePoly> val(n);
  if (is_canonical_zero(g)) return val;
  std::vector<int> order = detail::topo_order(g);
  std::vector<std::vector<const AbpEdge*>> in(n);
  for (const auto& e : g.edges) in[e.to].push_back(&e);
  val[g.source].coeffs.emplace(Monomial{}, 1);
  for (int v : order) {
    if (v == g.source) continue;
    SparsePoly acc;
    for (const AbpEdge* e : in[v])
      poly_add_in_place(acc, poly_mul_affine(val[e->from], e->label, F, cap), F, cap);
    val[v] = std::move(acc);
  }
  return val;
}

inline SparsePoly compute_polynomial(const Abp& g, const PrimeField& F,
                                     std::size_t cap = 1000000) {
  if (is_canonical_zero(g)) return SparsePoly{};
  return all_vertex_polynomials(g, F, cap)[g.sink];
}

inline Evaluator abp_evaluator(const Abp& g, const PrimeField& F) {
  return Evaluator{g.universe(), validate(g).degree,
                   [g, &F](const Assignment& a) { return evaluate(g, a, F); }};
}

// Incremental construction: merges parallel edges by summing labels, drops
// zero labels, prunes vertices off every source->sink path (with a warning),
// and validates the result. No path at all yields the canonical zero program.
class AbpBuilder {
 public:
  explicit AbpBuilder(int m, int generic_vars = 0, const PrimeField& F = PrimeField())
      : m_(m), generic_vars_(generic_vars), field_(F) {}

  int add_vertex(const std::string& name) {
    if (index_.count(name)) throw Error("duplicate vertex name: " + name);
    index_[name] = (int)names_.size();
    names_.push_back(name);
    return (int)names_.size() - 1;
  }

  int vertex(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown vertex: " + name);
    return it->second;
  }

  bool has_vertex(const std::string& name) const { return index_.count(name) != 0; }

  void set_source(int v) { source_ = v; }
  void set_sink(int v) { sink_ = v; }

  void add_edge(int from, int to, const AffineForm& label) {
    if (from < 0 || from >= (int)names_.size() || to < 0 || to >= (int)names_.size())
      throw Error("edge endpoint out of range");
    if (from == to) throw Error("self-loops are not allowed in an ABP");
    auto key = std::make_pair(from, to);
    auto it = merged_.find(key);
    if (it == merged_.end())
      merged_.emplace(key, label);
    else
      it->second = af_add(it->second, label, field_);
  }

  Abp build(std::vector<std::string>* warnings = nullptr) const {
    int n = (int)names_.size();
    if (source_ < 0 || sink_ < 0) throw Error("builder needs source and sink");
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (const auto& [key, label] : merged_) {
      if (label.is_zero()) continue;
      fwd[key.first].push_back(key.second);
      bwd[key.second].push_back(key.first);
    }
    auto reach = [n](int start, const std::vector<std::vector<int>>& adj) {
      std::vector<bool> seen(n, false);
      std::vector<int> stack{start};
      seen[start] = true;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
          if (!seen[w]) {
            seen[w] = true;
            stack.push_back(w);
          }
      }
      return seen;
    };
    std::vector<bool> from_src = reach(source_, fwd), to_sink = reach(sink_, bwd);

    Abp g;
    g.m = m_;
    g.generic_vars = generic_vars_;
    if (!to_sink[source_]) {
      // No source->sink path: canonical zero program.
      g.names = {names_[source_], names_[source_] == names_[sink_] ? "sink" : names_[sink_]};
      g.source = 0;
      g.sink = 1;
      if (warnings) warnings->push_back("no source->sink path; returning canonical zero program");
      return g;
    }
    std::vector<int> remap(n, -1);
    for (int v = 0; v < n; ++v) {
      if (from_src[v] && to_sink[v]) {
        remap[v] = (int)g.names.size();
        g.names.push_back(names_[v]);
      } else if (warnings) {
        warnings->push_back("pruned vertex off every source->sink path: " + names_[v]);
      }
    }
    g.source = remap[source_];
    g.sink = remap[sink_];
    for (const auto& [key, label] : merged_) {
      if (label.is_zero()) continue;
      int f = remap[key.first], t = remap[key.second];
      if (f >= 0 && t >= 0) g.edges.push_back(AbpEdge{f, t, label});
    }
    validate(g);
    return g;
  }

 private:
  int m_, generic_vars_;
  PrimeField field_;
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  int source_ = -1, sink_ = -1;
  std::map<std::pair<int, int>, AffineForm> merged_;
};

// Degree-layering transform: returns a degree-layered ABP computing exactly
// the degree-d homogeneous component of g, of size <= (d+1) * size(g).
//
// Construction: split every non-source vertex v into copies (v,k) carrying the
// degree-k part, route constant label parts within a degree level and linear
// parts across levels, then keep only each level's entry vertices (those with
// an incoming linear edge) and connect consecutive entry vertices directly
// with the linear form computed by the constant sub-ABP between them. The
// final level is collapsed into a single sink.
inline Abp homogenize(const Abp& g, int d, const PrimeField& F) {
  if (d < 0) throw Error("homogenize needs d >= 0");
  validate(g);
  int n = g.size();
  std::vector<int> order = is_canonical_zero(g) ? std::vector<int>{} : detail::topo_order(g);
  std::vector<int> topo_pos(n, 0);
  for (int i = 0; i < (int)order.size(); ++i) topo_pos[order[i]] = i;

  // Constant-part edges within a degree level (same for every level k in
  // which both endpoints exist) and linear-part edges between levels.
  struct CEdge {
    int from, to;
    u64 c;
  };
  struct LEdge {
    int from, to;
    const std::map<VarId, u64>* terms;
  };
  std::vector<CEdge> cedges;
  std::vector<LEdge> ledges;
  for (const auto& e : g.edges) {
    if (e.label.constant != 0) cedges.push_back({e.from, e.to, e.label.constant});
    if (!e.label.terms.empty()) ledges.push_back({e.from, e.to, &e.label.terms});
  }
  std::sort(cedges.begin(), cedges.end(),
            [&](const CEdge& a, const CEdge& b) { return topo_pos[a.from] < topo_pos[b.from]; });

  // Linear form computed by constant walks from `start`, per reachable vertex.
  // Level k only restricts which vertices exist: the source lives at level 0
  // only, so constant edges out of it participate only there.
  auto const_walk = [&](int start, bool level_zero) {
    std::vector<u64> w(n, 0);
    w[start] = 1;
    for (const CEdge& e : cedges) {
      if (!level_zero && e.from == g.source) continue;
      if (w[e.from] == 0 || e.to == g.source) continue;
      w[e.to] = F.add(w[e.to], F.mul(w[e.from], e.c));
    }
    return w;
  };

  if (d == 0) {
    // Degree-0 component: the constant term. Not degree-layered unless zero.
    u64 c = const_walk(g.source, true)[g.sink];
    AbpBuilder b(g.m, g.generic_vars, F);
    int s = b.add_vertex("s");
    int t = b.add_vertex("t");
    b.set_source(s);
    b.set_sink(t);
    if (c != 0) b.add_edge(s, t, af_constant(c));
    return b.build();
  }

  // Entry vertices of level k (1 <= k <= d): targets of linear edges. Level 0
  // has only the source.
  std::vector<std::vector<int>> entry(d + 1);
  entry[0] = {g.source};
  {
    std::vector<bool> is_target(n, false);
    for (const LEdge& e : ledges) is_target[e.to] = true;
    std::vector<int> targets;
    for (int v : order)
      if (is_target[v]) targets.push_back(v);
    for (int k = 1; k <= d; ++k) entry[k] = targets;
  }

  std::vector<std::vector<LEdge>> lin_by_src(n);
  for (const LEdge& e : ledges) lin_by_src[e.from].push_back(e);

  AbpBuilder b(g.m, g.generic_vars, F);
  auto node_name = [&](int v, int k) { return g.names[v] + "@" + std::to_string(k); };
  int src = b.add_vertex(node_name(g.source, 0));
  std::vector<std::map<int, int>> node_id(d + 1);
  node_id[0][g.source] = src;
  for (int k = 1; k < d; ++k)
    for (int v : entry[k]) node_id[k][v] = b.add_vertex(node_name(v, k));
  int snk = b.add_vertex(node_name(g.sink, d));
  b.set_source(src);
  b.set_sink(snk);

  // Constant walks from each entry vertex of the last level to the sink copy.
  std::vector<u64> sink_weight(n, 0);
  for (int v : entry[d]) sink_weight[v] = const_walk(v, false)[g.sink];

  for (int i = 0; i < d; ++i) {
    for (int v : entry[i]) {
      std::vector<u64> w = const_walk(v, i == 0);
      if (i + 1 < d) {
        std::map<int, AffineForm> acc;
        for (int u = 0; u < n; ++u) {
          if (w[u] == 0) continue;
          for (const LEdge& e : lin_by_src[u])
            for (const auto& [var, coeff] : *e.terms)
              af_add_term(acc[e.to], var, F.mul(w[u], coeff), F);
        }
        for (const auto& [target, form] : acc)
          if (!form.is_zero()) b.add_edge(node_id[i][v], node_id[i + 1][target], form);
      } else {
        // Collapse level d: fold the final constant walks into one sink edge.
        AffineForm form;
        for (int u = 0; u < n; ++u) {
          if (w[u] == 0) continue;
          for (const LEdge& e : lin_by_src[u]) {
            u64 tail = sink_weight[e.to];
            if (tail == 0) continue;
            for (const auto& [var, coeff] : *e.terms)
              af_add_term(form, var, F.mul(F.mul(w[u], coeff), tail), F);
          }
        }
        if (!form.is_zero()) b.add_edge(node_id[i][v], snk, form);
      }
    }
  }
  return b.build();
}

}  // namespace abpdet

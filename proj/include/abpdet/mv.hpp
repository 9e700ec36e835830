#pragma once

#include <string>
#include <vector>

#include "abpdet/abp.hpp"

namespace abpdet {

// Vertex count of the layered determinant program: m^3/3 - m/3 + 2.
inline long long mv_size(int m) {
  if (m < 1) throw Error("mv_size needs m >= 1");
  long long mm = m;
  return (mm * mm * mm - mm) / 3 + 2;
}

// Direct count for layer 1 <= i <= m-1: 1 + sum_{u=2..m} min(i,u).
inline long long mv_layer_count(int m, int i) {
  long long c = 1;
  for (int u = 2; u <= m; ++u) c += std::min(i, u);
  return c;
}

namespace detail {
inline std::string mv_name(int h, int u, int i) {
  return "(" + std::to_string(h) + "," + std::to_string(u) + "," + std::to_string(i) + ")";
}
}  // namespace detail

// Layered ABP computing det_m. Vertices are triples (h,u,i) with i the layer:
// the source (1,1,0), the sink (1,1,m), and for 1 <= i < m the vertex
// (i+1,i+1,i) plus (h,u,i) for 2 <= u <= m, 1 <= h <= min(i,u). Edges out of
// (h,u,i): to (h,v,i+1) labeled x^u_v for h < v <= m, and to (h',h',i+1)
// labeled -x^u_h for h < h' <= m (targets that are not vertices are dead ends
// and are skipped); the last layer connects to the sink with alpha * x^u_h,
// alpha = 1 for odd m and -1 otherwise. Within a layer vertices are ordered
// by (h,u); this is the order the printed adjacency matrices use.
inline Abp build_mv_abp(int m, const PrimeField& F = PrimeField()) {
  if (m < 1) throw Error("build_mv_abp needs m >= 1");
  AbpBuilder b(m, 0, F);
  if (m == 1) {
    int s = b.add_vertex(detail::mv_name(1, 1, 0));
    int t = b.add_vertex(detail::mv_name(1, 1, 1));
    b.set_source(s);
    b.set_sink(t);
    b.add_edge(s, t, af_var(matrix_var(1, 1)));
    return b.build();
  }

  struct V {
    int h, u, i;
  };
  std::vector<V> verts;
  verts.push_back({1, 1, 0});
  for (int i = 1; i < m; ++i) {
    std::vector<V> layer;
    for (int u = 2; u <= m; ++u)
      for (int h = 1; h <= std::min(i, u); ++h) layer.push_back({h, u, i});
    layer.push_back({i + 1, i + 1, i});
    std::sort(layer.begin(), layer.end(), [](const V& a, const V& b) {
      return a.h != b.h ? a.h < b.h : a.u < b.u;
    });
    verts.insert(verts.end(), layer.begin(), layer.end());
  }
  verts.push_back({1, 1, m});

  for (const V& v : verts) b.add_vertex(detail::mv_name(v.h, v.u, v.i));
  b.set_source(0);
  b.set_sink((int)verts.size() - 1);

  u64 minus_one = F.neg(1);
  u64 alpha = (m % 2 == 1) ? 1 : minus_one;
  for (const V& v : verts) {
    if (v.i == m) continue;
    int from = b.vertex(detail::mv_name(v.h, v.u, v.i));
    if (v.i + 1 < m) {
      for (int w = v.h + 1; w <= m; ++w) {
        std::string tgt = detail::mv_name(v.h, w, v.i + 1);
        if (b.has_vertex(tgt)) b.add_edge(from, b.vertex(tgt), af_var(matrix_var(v.u, w)));
      }
      for (int hp = v.h + 1; hp <= m; ++hp) {
        std::string tgt = detail::mv_name(hp, hp, v.i + 1);
        if (b.has_vertex(tgt))
          b.add_edge(from, b.vertex(tgt), af_var(matrix_var(v.u, v.h), minus_one));
      }
    } else {
      b.add_edge(from, b.vertex(detail::mv_name(1, 1, m)), af_var(matrix_var(v.u, v.h), alpha));
    }
  }
  return b.build();
}

}  // namespace abpdet

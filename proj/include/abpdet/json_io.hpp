#pragma once

#include <json.hpp>

#include "abpdet/detexpr.hpp"
#include "abpdet/imm.hpp"
#include "abpdet/lowerbound.hpp"

namespace abpdet {

// Serialization uses nlohmann ordered JSON with fixed field order and
// balanced integer representatives, so emission is deterministic and
// round-trip stable byte for byte.
using json = nlohmann::ordered_json;

struct SchemaError : Error {
  using Error::Error;
};

namespace jio {

inline long long get_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw SchemaError(where + ": missing integer field \"" + key + "\"");
  return j.at(key).get<long long>();
}

inline const json& get_array(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw SchemaError(where + ": missing array field \"" + key + "\"");
  return j.at(key);
}

inline std::string get_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw SchemaError(where + ": missing string field \"" + key + "\"");
  return j.at(key).get<std::string>();
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) ok = true;
    if (!ok) throw SchemaError(where + ": unknown field \"" + key + "\"");
  }
}

}  // namespace jio

// ---- affine forms: {"const": int, "terms": [{"row","col","coeff"}]} ----

inline json to_json(const AffineForm& f, const PrimeField& F) {
  json terms = json::array();
  for (const auto& [v, c] : f.terms)
    terms.push_back(json{{"row", v.row}, {"col", v.col}, {"coeff", F.to_balanced(c)}});
  return json{{"const", F.to_balanced(f.constant)}, {"terms", std::move(terms)}};
}

inline AffineForm affine_from_json(const json& j, const PrimeField& F) {
  jio::check_keys(j, {"const", "terms"}, "affine form");
  AffineForm f;
  f.constant = F.from_int(jio::get_int(j, "const", "affine form"));
  for (const json& t : jio::get_array(j, "terms", "affine form")) {
    jio::check_keys(t, {"row", "col", "coeff"}, "affine term");
    long long row = jio::get_int(t, "row", "affine term");
    long long col = jio::get_int(t, "col", "affine term");
    u64 coeff = F.from_int(jio::get_int(t, "coeff", "affine term"));
    VarId v = row == 0 ? generic_var((int)col) : matrix_var((int)row, (int)col);
    if (coeff != 0) {
      if (f.terms.count(v)) throw SchemaError("affine form: duplicate term for " + to_string(v));
      f.terms[v] = coeff;
    }
  }
  return f;
}

// ---- ABP: {"m","vertices","source","sink","edges"} ----

inline json to_json(const Abp& g, const PrimeField& F) {
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back(json{{"from", g.names[e.from]},
                         {"to", g.names[e.to]},
                         {"label", to_json(e.label, F)}});
  json j{{"m", g.m},
         {"vertices", g.names},
         {"source", g.names[g.source]},
         {"sink", g.names[g.sink]},
         {"edges", std::move(edges)}};
  if (g.generic_vars > 0) j["generic_vars"] = g.generic_vars;
  return j;
}

inline Abp abp_from_json(const json& j, const PrimeField& F) {
  jio::check_keys(j, {"m", "vertices", "source", "sink", "edges", "generic_vars"}, "abp");
  Abp g;
  g.m = (int)jio::get_int(j, "m", "abp");
  g.generic_vars = j.contains("generic_vars") ? (int)jio::get_int(j, "generic_vars", "abp") : 0;
  std::map<std::string, int> index;
  for (const json& v : jio::get_array(j, "vertices", "abp")) {
    if (!v.is_string()) throw SchemaError("abp: vertex names must be strings");
    std::string name = v.get<std::string>();
    if (index.count(name)) throw SchemaError("abp: duplicate vertex name " + name);
    index[name] = (int)g.names.size();
    g.names.push_back(name);
  }
  auto vertex = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw SchemaError("abp: unknown vertex " + name);
    return it->second;
  };
  g.source = vertex(jio::get_string(j, "source", "abp"));
  g.sink = vertex(jio::get_string(j, "sink", "abp"));
  for (const json& e : jio::get_array(j, "edges", "abp")) {
    jio::check_keys(e, {"from", "to", "label"}, "abp edge");
    if (!e.contains("label")) throw SchemaError("abp edge: missing label");
    g.edges.push_back(AbpEdge{vertex(jio::get_string(e, "from", "abp edge")),
                              vertex(jio::get_string(e, "to", "abp edge")),
                              affine_from_json(e.at("label"), F)});
  }
  validate(g);
  return g;
}

// ---- DetExpr: {"n","m","target","lambda","X"} (+ optional "sign") ----

inline json matrix_to_json(const ScalarMatrix& M, const PrimeField& F) {
  json rows = json::array();
  for (std::size_t r = 0; r < M.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < M.cols; ++c) row.push_back(F.to_balanced(M.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ScalarMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                                     const PrimeField& F, const std::string& where) {
  if (!j.is_array() || j.size() != rows) throw SchemaError(where + ": expected " +
                                                           std::to_string(rows) + " rows");
  ScalarMatrix M(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j.at(r);
    if (!row.is_array() || row.size() != cols)
      throw SchemaError(where + ": expected " + std::to_string(cols) + " columns");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row.at(c).is_number_integer()) throw SchemaError(where + ": entries must be integers");
      M.at(r, c) = F.from_int(row.at(c).get<long long>());
    }
  }
  return M;
}

inline TargetKind target_from_string(const std::string& s) {
  if (s == "det") return TargetKind::det;
  if (s == "perm") return TargetKind::perm;
  if (s == "generic") return TargetKind::generic;
  throw SchemaError("unknown target: " + s);
}

inline json to_json(const DetExpr& e, const PrimeField& F, std::optional<int> sign = {}) {
  json X = json::array();
  for (const auto& [v, M] : e.coeff)
    X.push_back(json{{"row", v.row}, {"col", v.col}, {"matrix", matrix_to_json(M, F)}});
  json j{{"n", e.n},
         {"m", e.m},
         {"target", to_string(e.target)},
         {"lambda", matrix_to_json(e.lambda, F)},
         {"X", std::move(X)}};
  if (sign) j["sign"] = *sign;
  return j;
}

inline DetExpr detexpr_from_json(const json& j, const PrimeField& F, int* sign_out = nullptr) {
  jio::check_keys(j, {"n", "m", "target", "lambda", "X", "sign"}, "detexpr");
  DetExpr e;
  e.n = (int)jio::get_int(j, "n", "detexpr");
  if (e.n < 1) throw SchemaError("detexpr: n must be >= 1");
  e.m = (int)jio::get_int(j, "m", "detexpr");
  e.target = target_from_string(jio::get_string(j, "target", "detexpr"));
  e.lambda = matrix_from_json(j.at("lambda"), e.n, e.n, F, "detexpr lambda");
  for (const json& x : jio::get_array(j, "X", "detexpr")) {
    jio::check_keys(x, {"row", "col", "matrix"}, "detexpr X");
    long long row = jio::get_int(x, "row", "detexpr X");
    long long col = jio::get_int(x, "col", "detexpr X");
    VarId v = row == 0 ? generic_var((int)col) : matrix_var((int)row, (int)col);
    if (e.coeff.count(v)) throw SchemaError("detexpr: duplicate coefficient matrix for " +
                                            to_string(v));
    if (!x.contains("matrix")) throw SchemaError("detexpr X: missing matrix");
    ScalarMatrix M = matrix_from_json(x.at("matrix"), e.n, e.n, F, "detexpr X matrix");
    if (!M.is_zero()) e.coeff.emplace(v, std::move(M));
  }
  if (sign_out) *sign_out = j.contains("sign") ? (int)jio::get_int(j, "sign", "detexpr") : 1;
  return e;
}

// ---- HIMM: {"m","shapes","mats"} with sparse entries ----

inline json to_json(const HimmExpr& h, const PrimeField& F) {
  json mats = json::array();
  for (std::size_t s = 0; s < h.mats.size(); ++s) {
    json entries = json::array();
    for (const auto& [rc, f] : h.mats[s])
      entries.push_back(json{{"r", rc.first}, {"c", rc.second}, {"form", to_json(f, F)}});
    mats.push_back(json{{"rows", h.next_dim(s)}, {"cols", h.shapes[s]},
                        {"entries", std::move(entries)}});
  }
  return json{{"m", h.m}, {"shapes", h.shapes}, {"mats", std::move(mats)}};
}

inline HimmExpr himm_from_json(const json& j, const PrimeField& F) {
  jio::check_keys(j, {"m", "shapes", "mats"}, "himm");
  HimmExpr h;
  h.m = (int)jio::get_int(j, "m", "himm");
  for (const json& s : jio::get_array(j, "shapes", "himm")) {
    if (!s.is_number_integer()) throw SchemaError("himm: shapes must be integers");
    h.shapes.push_back(s.get<int>());
  }
  const json& mats = jio::get_array(j, "mats", "himm");
  h.mats.resize(mats.size());
  for (std::size_t s = 0; s < mats.size(); ++s) {
    jio::check_keys(mats.at(s), {"rows", "cols", "entries"}, "himm matrix");
    for (const json& ent : jio::get_array(mats.at(s), "entries", "himm matrix")) {
      jio::check_keys(ent, {"r", "c", "form"}, "himm entry");
      int r = (int)jio::get_int(ent, "r", "himm entry");
      int c = (int)jio::get_int(ent, "c", "himm entry");
      if (!ent.contains("form")) throw SchemaError("himm entry: missing form");
      h.mats[s][{r, c}] = affine_from_json(ent.at("form"), F);
    }
  }
  validate_himm(h);
  return h;
}

// ---- trace-form IMM: {"n","m","mats"} dense ----

inline json affine_matrix_to_json(const AffineMatrix& A, const PrimeField& F) {
  json rows = json::array();
  for (std::size_t r = 0; r < A.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < A.cols; ++c) row.push_back(to_json(A.at(r, c), F));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline AffineMatrix affine_matrix_from_json(const json& j, const PrimeField& F,
                                            const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a nonempty array");
  AffineMatrix A(j.size(), j.at(0).size());
  for (std::size_t r = 0; r < A.rows; ++r) {
    const json& row = j.at(r);
    if (!row.is_array() || row.size() != A.cols) throw SchemaError(where + ": ragged matrix");
    for (std::size_t c = 0; c < A.cols; ++c) A.at(r, c) = affine_from_json(row.at(c), F);
  }
  return A;
}

inline json to_json(const ImmExpr& e, const PrimeField& F) {
  json mats = json::array();
  for (const AffineMatrix& B : e.mats) mats.push_back(affine_matrix_to_json(B, F));
  return json{{"n", e.n}, {"m", e.m}, {"mats", std::move(mats)}};
}

inline ImmExpr imm_from_json(const json& j, const PrimeField& F) {
  jio::check_keys(j, {"n", "m", "mats"}, "imm");
  ImmExpr e;
  e.n = (int)jio::get_int(j, "n", "imm");
  if (e.n < 1) throw SchemaError("imm: n must be >= 1");
  e.m = (int)jio::get_int(j, "m", "imm");
  for (const json& mj : jio::get_array(j, "mats", "imm")) {
    AffineMatrix B = affine_matrix_from_json(mj, F, "imm matrix");
    if ((int)B.rows != e.n || (int)B.cols != e.n) throw SchemaError("imm: matrices must be n x n");
    e.mats.push_back(std::move(B));
  }
  return e;
}

// ---- matrix-power form: {"n","m","power","matrix"} ----

inline json power_to_json(const AffineMatrix& A, int m, int power, const PrimeField& F) {
  return json{{"n", A.rows}, {"m", m}, {"power", power},
              {"matrix", affine_matrix_to_json(A, F)}};
}

// ---- certificates ----

inline json to_json(const LayerRankCertificate& c) {
  return json{{"layer", c.layer},         {"vertex_count", c.vertex_count},
              {"coeff_rank", c.coeff_rank}, {"bound", c.bound},
              {"holds", c.holds},         {"span_ok", c.span_ok}};
}

inline json to_json(const std::vector<LayerRankCertificate>& cs) {
  json arr = json::array();
  for (const auto& c : cs) arr.push_back(to_json(c));
  return arr;
}

}  // namespace abpdet

#include <abpdet/imm.hpp>
#include <abpdet/mv.hpp>
#include <catch2/catch_amalgamated.hpp>

#include "support/test_helpers.hpp"

using namespace abpdet;
using testsupport::random_assignment;
using testsupport::random_himm;
using testsupport::random_layered_abp;

namespace {
const PrimeField F;
}

TEST_CASE("grenet sizes and shapes") {
  for (int m = 1; m <= 12; ++m) {
    HimmExpr h = grenet_perm(m);
    REQUIRE(h.size() == (1 << m) - 1);
    for (int s = 0; s < m; ++s) {
      long long expect = 1;
      for (int i = 1; i <= s; ++i) expect = expect * (m - i + 1) / i;
      REQUIRE((long long)h.shapes[s] == expect);
    }
  }
  REQUIRE_THROWS_AS(grenet_perm(0), Error);
  REQUIRE_THROWS_AS(grenet_perm(21), Error);
}

TEST_CASE("grenet m=1 is the single variable") {
  HimmExpr h = grenet_perm(1);
  REQUIRE(h.size() == 1);
  REQUIRE(h.mats.size() == 1);
  REQUIRE(h.mats[0].at({0, 0}) == af_var(matrix_var(1, 1)));
}

TEST_CASE("grenet computes the permanent") {
  for (int m = 2; m <= 6; ++m)
    REQUIRE(pit_equal(himm_evaluator(grenet_perm(m), F), perm_reference_evaluator(m, F), 20,
                      500 + m, F)
                .equal);
}

TEST_CASE("grenet expansion has all-positive coefficients at m = 3") {
  SparsePoly p = expand_symbolic(grenet_perm(3), F);
  REQUIRE(p == target_poly(TargetKind::perm, 3, F));
  for (const auto& [mono, c] : p.coeffs) REQUIRE(c == 1);
}

TEST_CASE("grenet layer vertices compute sub-permanents of row subsets") {
  Abp g = himm_to_dlabp(grenet_perm(4), F);
  auto layer = *layers_of(g);
  auto polys = all_vertex_polynomials(g, F);
  // Layer 2, subsets in lexicographic order: {1,2},{1,3},{1,4},{2,3},...
  std::vector<std::vector<int>> subsets = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  std::vector<int> layer2;
  for (int v = 0; v < g.size(); ++v)
    if (layer[v] == 2) layer2.push_back(v);
  REQUIRE(layer2.size() == subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k)
    REQUIRE(polys[layer2[k]] == subtarget_poly(TargetKind::perm, subsets[k], {1, 2}, F));
}

TEST_CASE("himm_to_dlabp on grenet(3)") {
  Abp g = himm_to_dlabp(grenet_perm(3), F);
  AbpReport rep = validate(g);
  REQUIRE(rep.size == 8);
  REQUIRE(rep.is_degree_layered);
  REQUIRE(rep.layer_profile == std::vector<int>{1, 3, 3, 1});
}

TEST_CASE("single-variable himm gives a 2-vertex program") {
  HimmExpr h;
  h.m = 1;
  h.shapes = {1};
  h.mats.resize(1);
  h.mats[0][{0, 0}] = af_var(matrix_var(1, 1));
  Abp g = himm_to_dlabp(h, F);
  REQUIRE(g.size() == 2);
}

TEST_CASE("dlabp <-> himm round trips restore shapes and entries") {
  for (u64 seed = 0; seed < 6; ++seed) {
    HimmExpr h = random_himm(seed, 4, 4, 3, F);
    Abp g = himm_to_dlabp(h, F);
    REQUIRE(g.size() == h.size() + 1);
    HimmExpr back = dlabp_to_himm(g);
    REQUIRE(back == h);
  }
  HimmExpr g3 = grenet_perm(3);
  REQUIRE(dlabp_to_himm(himm_to_dlabp(g3, F)) == g3);
}

TEST_CASE("dlabp_to_himm rejects non-degree-layered programs") {
  // Constant labels break degree layering.
  AbpBuilder b(2, 0, F);
  int s = b.add_vertex("s"), a = b.add_vertex("a"), t = b.add_vertex("t");
  b.set_source(s);
  b.set_sink(t);
  b.add_edge(s, a, af_constant(2));
  b.add_edge(a, t, af_var(matrix_var(1, 1)));
  REQUIRE_THROWS_AS(dlabp_to_himm(b.build()), Error);
  // MV labels are pure linear forms, so MV(3) itself converts fine.
  REQUIRE_NOTHROW(dlabp_to_himm(build_mv_abp(3, F)));
}

TEST_CASE("labp_to_imm trace form") {
  SECTION("single edge") {
    AbpBuilder b(1, 0, F);
    int s = b.add_vertex("s"), t = b.add_vertex("t");
    b.set_source(s);
    b.set_sink(t);
    b.add_edge(s, t, af_var(matrix_var(1, 1)));
    ImmExpr e = labp_to_imm(b.build(), F);
    REQUIRE(e.n == 1);
    REQUIRE(e.mats.size() == 1);
    Assignment a;
    a.set(matrix_var(1, 1), 9);
    REQUIRE(evaluate(e, a, F) == 9);
  }
  SECTION("MV(3) gives a 9x9 trace form equal to det_3") {
    ImmExpr e = labp_to_imm(build_mv_abp(3, F), F);
    REQUIRE(e.n == 9);
    REQUIRE(pit_equal(imm_evaluator(e, F), det_reference_evaluator(3, F), 20, 8, F).equal);
  }
  SECTION("grenet(4) dlabp gives a trace form equal to perm_4") {
    Abp g = himm_to_dlabp(grenet_perm(4), F);
    ImmExpr e = labp_to_imm(g, F);
    REQUIRE(e.n == g.size() - 1);
    REQUIRE(pit_equal(imm_evaluator(e, F), perm_reference_evaluator(4, F), 20, 9, F).equal);
  }
  SECTION("the symbolic product is supported on the root entry alone") {
    for (u64 seed : {4ull, 9ull}) {
      Abp g = random_layered_abp(seed, 10, 3, 2, false, F);
      ImmExpr e = labp_to_imm(g, F);
      REQUIRE(e.n <= 9);
      // Multiply the matrices symbolically (polynomial entries).
      std::vector<std::vector<SparsePoly>> acc(e.n, std::vector<SparsePoly>(e.n));
      for (int i = 0; i < e.n; ++i) acc[i][i].coeffs.emplace(Monomial{}, 1);
      for (const AffineMatrix& B : e.mats) {
        std::vector<std::vector<SparsePoly>> next(e.n, std::vector<SparsePoly>(e.n));
        for (int i = 0; i < e.n; ++i)
          for (int k = 0; k < e.n; ++k) {
            if (B.at(i, k).is_zero()) continue;
            for (int j = 0; j < e.n; ++j)
              if (!acc[k][j].is_zero())
                poly_add_in_place(next[i][j], poly_mul_affine(acc[k][j], B.at(i, k), F, 100000),
                                  F, 100000);
          }
        acc = std::move(next);
      }
      for (int i = 0; i < e.n; ++i)
        for (int j = 0; j < e.n; ++j)
          if (i != 0 || j != 0) REQUIRE(acc[i][j].is_zero());
      REQUIRE(acc[0][0] == compute_polynomial(g, F));
    }
  }
}

TEST_CASE("to_matrix_power") {
  SECTION("single edge") {
    AbpBuilder b(1, 0, F);
    int s = b.add_vertex("s"), t = b.add_vertex("t");
    b.set_source(s);
    b.set_sink(t);
    b.add_edge(s, t, af_var(matrix_var(1, 1)));
    AffineMatrix A = to_matrix_power(b.build(), F);
    REQUIRE(A.rows == 1);
    REQUIRE(A.at(0, 0) == af_var(matrix_var(1, 1)));
  }
  SECTION("grenet(3) gives a 7x7 matrix with trace(A^3) = perm_3") {
    Abp g = himm_to_dlabp(grenet_perm(3), F);
    AffineMatrix A = to_matrix_power(g, F);
    REQUIRE(A.rows == 7);
    Evaluator lhs{matrix_universe(3), 3,
                  [A](const Assignment& a) { return evaluate_power(A, 3, a, PrimeField()); }};
    REQUIRE(pit_equal(lhs, perm_reference_evaluator(3, F), 20, 10, F).equal);
  }
  SECTION("MV(3) is degree layered and trace(A^3) = det_3") {
    Abp g = build_mv_abp(3, F);
    AffineMatrix A = to_matrix_power(g, F);
    Evaluator lhs{matrix_universe(3), 3,
                  [A](const Assignment& a) { return evaluate_power(A, 3, a, PrimeField()); }};
    REQUIRE(pit_equal(lhs, det_reference_evaluator(3, F), 20, 11, F).equal);
  }
  SECTION("homogenized MV(3) gives the same trace identity") {
    Abp g = homogenize(build_mv_abp(3, F), 3, F);
    AffineMatrix A = to_matrix_power(g, F);
    Evaluator lhs{matrix_universe(3), 3,
                  [A](const Assignment& a) { return evaluate_power(A, 3, a, PrimeField()); }};
    REQUIRE(pit_equal(lhs, det_reference_evaluator(3, F), 20, 12, F).equal);
  }
}

TEST_CASE("block multilinearity") {
  SECTION("grenet is column-wise multilinear") {
    for (int m = 2; m <= 5; ++m)
      REQUIRE(check_block_multilinear(grenet_perm(m), Grouping::column_wise(m)).ok);
  }
  SECTION("grenet is not row-wise multilinear") {
    MultilinearReport rep = check_block_multilinear(grenet_perm(3), Grouping::row_wise(3));
    REQUIRE_FALSE(rep.ok);
    REQUIRE_FALSE(rep.violations.empty());
  }
  SECTION("a constructed mix of two columns is flagged") {
    HimmExpr h;
    h.m = 2;
    h.shapes = {1};
    h.mats.resize(1);
    AffineForm f = af_var(matrix_var(1, 1));
    af_add_term(f, matrix_var(1, 2), 1, F);
    h.mats[0][{0, 0}] = f;
    MultilinearReport rep = check_block_multilinear(h, Grouping::column_wise(2));
    REQUIRE_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 1);
    REQUIRE(rep.violations[0].s == 1);
    REQUIRE(rep.violations[0].groups == std::vector<int>{1, 2});
  }
}

TEST_CASE("size identities on random programs") {
  for (u64 seed = 0; seed < 10; ++seed) {
    HimmExpr h = random_himm(seed, 3 + seed % 3, 4, 3, F);
    Abp g = himm_to_dlabp(h, F);
    REQUIRE(g.size() == h.size() + 1);
    REQUIRE(dlabp_to_himm(g).size() == g.size() - 1);

    Abp lay = random_layered_abp(seed, 12, 4, 3, false, F);
    ImmExpr imm = labp_to_imm(lay, F);
    REQUIRE(imm.n == lay.size() - 1);
  }
}

TEST_CASE("himm validation rejects affine entries") {
  HimmExpr h;
  h.m = 1;
  h.shapes = {1};
  h.mats.resize(1);
  h.mats[0][{0, 0}] = af_constant(1);
  REQUIRE_THROWS_AS(validate_himm(h), Error);
}

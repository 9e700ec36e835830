#include <abpdet/mv.hpp>
#include <abpdet/pit.hpp>
#include <catch2/catch_amalgamated.hpp>

using namespace abpdet;

namespace {
const PrimeField F;
}

TEST_CASE("pit reflexivity") {
  Evaluator d3 = det_reference_evaluator(3, F);
  PitVerdict v = pit_equal(d3, d3, 20, 123, F);
  REQUIRE(v.equal);
  REQUIRE(v.trials == 20);
  REQUIRE(v.log10_error_bound < -300.0);  // (3/p)^20
}

TEST_CASE("pit separates det_3 from perm_3") {
  PitVerdict v = pit_equal(det_reference_evaluator(3, F), perm_reference_evaluator(3, F), 20, 5, F);
  REQUIRE_FALSE(v.equal);
  REQUIRE(v.witness.has_value());
  REQUIRE(v.trials <= 3);
  REQUIRE(det_reference(3, *v.witness, F) == v.lhs_value);
  REQUIRE(perm_reference(3, *v.witness, F) == v.rhs_value);
}

TEST_CASE("pit verdicts are reproducible from the seed") {
  PitVerdict a = pit_equal(det_reference_evaluator(3, F), perm_reference_evaluator(3, F), 20, 7, F);
  PitVerdict b = pit_equal(det_reference_evaluator(3, F), perm_reference_evaluator(3, F), 20, 7, F);
  REQUIRE_FALSE(a.equal);
  REQUIRE(a.witness->values == b.witness->values);
}

TEST_CASE("MV program is PIT-equal to det_3") {
  Abp g = build_mv_abp(3, F);
  PitVerdict v = pit_equal(abp_evaluator(g, F), det_reference_evaluator(3, F), 20, 11, F);
  REQUIRE(v.equal);
}

TEST_CASE("pit rejects nonpositive trial counts") {
  REQUIRE_THROWS_AS(pit_equal(det_reference_evaluator(2, F), det_reference_evaluator(2, F), 0, 1, F),
                    Error);
}

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "abpdet/oracles.hpp"
#include "abpdet/rng.hpp"

namespace abpdet {

// Anything that can be evaluated at a field point: a variable universe, a
// degree bound (for the Schwartz-Zippel error bound), and the evaluation map.
struct Evaluator {
  std::vector<VarId> universe;
  int degree = 0;
  std::function<u64(const Assignment&)> eval;
};

inline Evaluator det_reference_evaluator(int m, const PrimeField& F) {
  return Evaluator{matrix_universe(m), m,
                   [m, &F](const Assignment& a) { return det_reference(m, a, F); }};
}

inline Evaluator perm_reference_evaluator(int m, const PrimeField& F) {
  return Evaluator{matrix_universe(m), m,
                   [m, &F](const Assignment& a) { return perm_reference(m, a, F); }};
}

inline Evaluator poly_evaluator(const SparsePoly& p, const PrimeField& F) {
  std::set<VarId> vars;
  for (const auto& [mo, c] : p.coeffs) vars.insert(mo.begin(), mo.end());
  return Evaluator{std::vector<VarId>(vars.begin(), vars.end()), p.degree(),
                   [p, &F](const Assignment& a) { return eval_poly(p, a, F); }};
}

struct PitVerdict {
  bool equal = true;
  int trials = 0;
  int max_degree = 0;
  // log10 of the false-negative bound (max_degree / p)^trials for an "equal"
  // verdict; meaningless when a witness was found.
  double log10_error_bound = 0.0;
  std::optional<Assignment> witness;
  u64 lhs_value = 0, rhs_value = 0;
};

// Randomized polynomial identity test. Trial i samples every universe
// variable from derive_stream(seed, i), so the verdict is a pure function of
// (seed, inputs) no matter how trials are scheduled.
inline PitVerdict pit_equal(const Evaluator& f, const Evaluator& g, int trials, u64 seed,
                            const PrimeField& F) {
  if (trials < 1) throw Error("pit_equal needs trials >= 1");
  std::set<VarId> universe(f.universe.begin(), f.universe.end());
  universe.insert(g.universe.begin(), g.universe.end());

  PitVerdict v;
  v.trials = trials;
  v.max_degree = std::max(f.degree, g.degree);
  for (int i = 0; i < trials; ++i) {
    SplitMix64 gen = derive_stream(seed, (u64)i);
    Assignment a;
    for (VarId var : universe) a.set(var, uniform_scalar(gen, F));
    u64 lhs = f.eval(a);
    u64 rhs = g.eval(a);
    if (lhs != rhs) {
      v.equal = false;
      v.witness = std::move(a);
      v.lhs_value = lhs;
      v.rhs_value = rhs;
      v.trials = i + 1;
      return v;
    }
  }
  v.log10_error_bound =
      trials * (std::log10((double)std::max(1, v.max_degree)) - std::log10((double)F.modulus()));
  return v;
}

}  // namespace abpdet

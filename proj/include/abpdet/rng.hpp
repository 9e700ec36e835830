#pragma once

#include <bit>

#include "abpdet/field.hpp"

namespace abpdet {

// SplitMix64 (Steele/Lea/Flood constants). All randomized verdicts in the
// artifact are reproducible from a single 64-bit seed through this generator;
// independent sub-streams are derived with derive_stream(seed, index).
class SplitMix64 {
 public:
  explicit SplitMix64(u64 seed) : state_(seed) {}

  u64 next() {
    u64 z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  u64 state_;
};

inline u64 mix64(u64 z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stream i of a seed: state = mix64(seed + golden * (i+1)). Trial i of a PIT
// run draws from derive_stream(seed, i), so verdicts do not depend on the
// order trials execute in.
inline SplitMix64 derive_stream(u64 seed, u64 index) {
  return SplitMix64(mix64(seed + 0x9e3779b97f4a7c15ull * (index + 1)));
}

// Uniform residue in [0, p) by rejection on bit_width(p) bits (no modulo bias).
inline u64 uniform_scalar(SplitMix64& g, const PrimeField& F) {
  int bits = std::bit_width(F.modulus());
  u64 mask = bits >= 64 ? ~u64(0) : (u64(1) << bits) - 1;
  for (;;) {
    u64 v = g.next() & mask;
    if (v < F.modulus()) return v;
  }
}

inline u64 uniform_nonzero(SplitMix64& g, const PrimeField& F) {
  for (;;) {
    u64 v = uniform_scalar(g, F);
    if (v != 0) return v;
  }
}

}  // namespace abpdet

#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace abpdet {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a symbolic expansion grows past its monomial cap.
struct CapExceeded : Error {
  std::size_t count;
  explicit CapExceeded(std::size_t n)
      : Error("symbolic expansion exceeds cap: " + std::to_string(n) + " monomials"), count(n) {}
};

inline constexpr u64 kDefaultPrime = (u64(1) << 61) - 1;  // Mersenne prime 2^61 - 1

namespace detail {
inline u64 mulmod_u64(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

inline u64 powmod_u64(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}
}  // namespace detail

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = detail::powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = detail::mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Arithmetic context for the prime field Z/p. Scalars are reduced residues in
// [0, p); every operation below keeps them reduced. The modulus is fixed at
// construction (default 2^61 - 1) and must be a prime in (10^9, 2^62) so that
// sums never overflow and Schwartz-Zippel error bounds stay below 10^-7 per
// trial at the degrees in scope.
class PrimeField {
 public:
  explicit PrimeField(u64 p = kDefaultPrime) : p_(p) {
    if (p <= 1000000000ull) throw Error("field modulus must exceed 10^9");
    if (p >= (u64(1) << 62)) throw Error("field modulus must be below 2^62");
    if (!is_prime_u64(p)) throw Error("field modulus must be prime: " + std::to_string(p));
  }

  u64 modulus() const { return p_; }

  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }
  u64 mul(u64 a, u64 b) const { return detail::mulmod_u64(a, b, p_); }
  u64 pow(u64 a, u64 e) const { return detail::powmod_u64(a % p_, e, p_); }

  u64 inv(u64 a) const {
    if (a % p_ == 0) throw Error("division by zero in prime field");
    return pow(a, p_ - 2);
  }

  // Reduce a signed integer to its residue.
  u64 from_int(long long v) const {
    long long r = v % (long long)p_;
    if (r < 0) r += (long long)p_;
    return u64(r);
  }

  // Balanced representative in (-p/2, p/2]; used for human-facing output.
  long long to_balanced(u64 a) const {
    return a > p_ / 2 ? (long long)a - (long long)p_ : (long long)a;
  }

 private:
  u64 p_;
};

}  // namespace abpdet

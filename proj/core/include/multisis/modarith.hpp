#pragma once

#include <cstdint>
#include <stdexcept>

namespace multisis {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Moduli are capped so that a product of two residues fits a 128-bit
// accumulator with headroom for one addition before reduction.
inline constexpr int kMaxModulusBits = 62;

inline u64 mul_mod(u64 a, u64 b, u64 q) {
  return static_cast<u64>((u128(a) * b) % q);
}

inline u64 add_mod(u64 a, u64 b, u64 q) {
  u64 s = a + b;  // a, b < q < 2^62, no wrap
  return s >= q ? s - q : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + q - b; }

inline u64 neg_mod(u64 a, u64 q) { return a == 0 ? 0 : q - a; }

// Canonical residue in [0, q) of a signed integer.
inline u64 residue_of(i64 v, u64 q) {
  i64 r = v % static_cast<i64>(q);
  if (r < 0) r += static_cast<i64>(q);
  return static_cast<u64>(r);
}

inline u64 pow_mod(u64 a, u64 e, u64 q) {
  u64 r = 1 % q;
  a %= q;
  while (e) {
    if (e & 1) r = mul_mod(r, a, q);
    a = mul_mod(a, a, q);
    e >>= 1;
  }
  return r;
}

// Inverse modulo a prime q via Fermat; a must be nonzero mod q.
inline u64 inv_mod(u64 a, u64 q) {
  a %= q;
  if (a == 0) throw std::domain_error("inv_mod: zero has no inverse");
  return pow_mod(a, q - 2, q);
}

// Deterministic Miller-Rabin, valid for all n < 2^64.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// A modulus admissible as q: prime and within the 62-bit cap.
inline bool valid_modulus(u64 q) {
  return q >= 2 && (q >> kMaxModulusBits) == 0 && is_prime_u64(q);
}

}  // namespace multisis

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>

namespace multisis {

using BigInt = boost::multiprecision::cpp_int;

// Natural log of a positive big integer, accurate to ~1e-15 relative: take
// the top 64 bits as a double mantissa and add the shift in units of ln 2.
inline double big_log(const BigInt& x) {
  if (x <= 0) throw std::domain_error("big_log: non-positive argument");
  const unsigned bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 63) return std::log(static_cast<double>(x));
  const unsigned shift = bits - 63;
  const BigInt top = x >> shift;
  return std::log(static_cast<double>(top)) + double(shift) * 0.6931471805599453094;
}

// q^e as an exact big integer.
inline BigInt big_pow(std::uint64_t base, unsigned exp) {
  BigInt r = 1;
  BigInt b = base;
  while (exp) {
    if (exp & 1u) r *= b;
    b *= b;
    exp >>= 1u;
  }
  return r;
}

}  // namespace multisis

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>

namespace cantorlab {

// Stage products (and additive-energy counts) outgrow 64 bits quickly once
// the stage count or branching factors rise, so every exact integer quantity
// is kept in arbitrary precision and converted to double only at the point a
// formula needs real arithmetic.
using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline double to_double(const BigInt& x) { return x.convert_to<double>(); }
inline double to_double(const BigRat& q) { return q.convert_to<double>(); }

inline BigInt pow_big(const BigInt& base, unsigned exp) {
  BigInt r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

// Natural log of a positive BigInt, safe when the value overflows double.
inline double log_big(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = boost::multiprecision::msb(x);
  if (bits <= 900) return std::log(to_double(x));
  const std::size_t shift = bits - 52;
  return std::log(to_double(BigInt(x >> shift))) +
         static_cast<double>(shift) * 0.6931471805599453;
}

}  // namespace cantorlab

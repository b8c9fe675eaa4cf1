#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace percotree {

inline long double big_log(const boost::multiprecision::cpp_int& v) {
  if (v <= 0) return -std::numeric_limits<long double>::infinity();
  std::size_t bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 64) return std::log(static_cast<long double>(v.convert_to<std::uint64_t>()));
  std::size_t shift = bits - 64;
  std::uint64_t top = static_cast<std::uint64_t>(v >> shift);
  return std::log(static_cast<long double>(top)) + static_cast<long double>(shift) * std::log(2.0L);
}

// ceil(x), but values within 1e-12 relative of an integer round to it
inline std::uint64_t tie_ceil(long double x) {
  if (!(x > 0.0L)) return 1;
  long double r = std::round(x);
  long double c = std::fabs(x - r) <= 1e-12L * x ? r : std::ceil(x);
  if (c < 1.0L) c = 1.0L;
  return static_cast<std::uint64_t>(c);
}

// 1 - (1 - x)^m for x in [0,1]
inline double one_minus_pow(double x, double m) {
  if (x >= 1.0) return 1.0;
  return -std::expm1(m * std::log1p(-x));
}

struct KahanSum {
  long double sum = 0.0L;
  long double comp = 0.0L;
  void add(long double v) {
    long double y = v - comp;
    long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  long double value() const { return sum; }
};

}  // namespace percotree

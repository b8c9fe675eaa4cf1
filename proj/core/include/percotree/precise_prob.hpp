#pragma once

#include <cmath>
#include <compare>
#include <string>

namespace percotree {

// A probability stored as base + offset so that values such as 1/2 + 3^-40
// stay distinct and ordered.
struct PreciseProb {
  long double base = 0.0L;
  long double offset = 0.0L;

  PreciseProb() = default;
  PreciseProb(long double v) : base(v) {}  // NOLINT(google-explicit-constructor)
  PreciseProb(long double b, long double off) : base(b), offset(off) {}

  long double value() const { return base + offset; }
  double to_double() const { return static_cast<double>(base + offset); }

  long double log() const {
    if (base > 0.0L) return std::log(base) + std::log1p(offset / base);
    return std::log(base + offset);
  }

  bool is_exact_base() const { return offset == 0.0L; }
  bool in_open_unit() const { return compare(*this, 0.0L) > 0 && compare(*this, 1.0L) < 0; }

  // a - b without cancelling the offsets
  static long double difference(const PreciseProb& a, const PreciseProb& b) {
    return (a.base - b.base) + (a.offset - b.offset);
  }

  static int compare(const PreciseProb& a, const PreciseProb& b) {
    long double d = difference(a, b);
    return d < 0.0L ? -1 : (d > 0.0L ? 1 : 0);
  }

  friend bool operator==(const PreciseProb& a, const PreciseProb& b) { return compare(a, b) == 0; }
  friend bool operator<(const PreciseProb& a, const PreciseProb& b) { return compare(a, b) < 0; }
  friend bool operator>(const PreciseProb& a, const PreciseProb& b) { return compare(a, b) > 0; }
  friend bool operator<=(const PreciseProb& a, const PreciseProb& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const PreciseProb& a, const PreciseProb& b) { return compare(a, b) >= 0; }

  std::string str() const;
};

}  // namespace percotree

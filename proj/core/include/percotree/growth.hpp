#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "percotree/precise_prob.hpp"

namespace percotree {

using BigInt = boost::multiprecision::cpp_int;

// max(1, ceil(log2 k)), with L(0) = 1
std::uint64_t log2_factor(std::size_t k);

// f(k) = coef * rate^-k * max(1,k)^alpha * L(k)^beta
struct GrowthTarget {
  PreciseProb rate{0.5L};
  std::uint64_t int_base = 2;  // 1/rate when that is an integer, else 0
  std::uint64_t coef = 1;
  int alpha = 0;
  int beta = 0;

  static GrowthTarget power(std::uint64_t base, int alpha = 0, int beta = 0, std::uint64_t coef = 1);
  static GrowthTarget inverse_prob(const PreciseProb& p, int alpha = 2);

  bool exact() const { return int_base != 0; }
  long double log_value(std::size_t k) const;
  BigInt exact_value(std::size_t k) const;
  // f(k) / f(k-1) for k >= 2
  long double step_ratio(std::size_t k) const;
  std::string describe() const;
};

// a * rate^-k * max(1,k)^alpha * L(k)^beta <= |G_k| <= upper * f(k), k >= 1
struct GrowthEnvelope {
  PreciseProb rate{0.5L};
  long double log_a = 0.0L;
  int alpha = 0;
  int beta = 0;
  long double log_upper = std::numeric_limits<long double>::infinity();

  bool has_upper() const { return log_upper < std::numeric_limits<long double>::infinity(); }
  GrowthEnvelope scaled(long double factor) const;
};

// Upper bound on sum_{k>m} p^-k / (k^extra |G_k|), or nothing when the
// envelope cannot bound it.
std::optional<long double> series_tail_upper(const GrowthEnvelope& env, const PreciseProb& p,
                                             std::size_t m, int extra);

// True when sum_k p^-k / (k^extra |G_k|) provably diverges from the upper envelope.
bool series_diverges(const GrowthEnvelope& env, const PreciseProb& p, int extra);

}  // namespace percotree

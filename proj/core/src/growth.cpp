#include "percotree/growth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace percotree {

std::uint64_t log2_factor(std::size_t k) {
  if (k <= 2) return 1;
  std::uint64_t bits = 0;
  std::size_t v = k - 1;
  while (v) {
    ++bits;
    v >>= 1;
  }
  return bits;
}

GrowthTarget GrowthTarget::power(std::uint64_t base, int alpha, int beta, std::uint64_t coef) {
  if (base < 2) throw std::invalid_argument("growth base must be at least 2");
  if (alpha < 0 || beta < 0) throw std::invalid_argument("growth exponents must be nonnegative");
  if (coef == 0) throw std::invalid_argument("growth coefficient must be positive");
  GrowthTarget g;
  g.rate = PreciseProb(1.0L / static_cast<long double>(base));
  g.int_base = base;
  g.coef = coef;
  g.alpha = alpha;
  g.beta = beta;
  return g;
}

GrowthTarget GrowthTarget::inverse_prob(const PreciseProb& p, int alpha) {
  if (!p.in_open_unit()) throw std::invalid_argument("growth rate must lie in (0,1)");
  if (alpha < 0) throw std::invalid_argument("growth exponents must be nonnegative");
  GrowthTarget g;
  g.rate = p;
  g.int_base = 0;
  if (p.is_exact_base()) {
    long double inv = 1.0L / p.base;
    long double r = std::round(inv);
    if (r >= 2.0L && r < 1e18L && 1.0L / r == p.base) g.int_base = static_cast<std::uint64_t>(r);
  }
  g.alpha = alpha;
  return g;
}

long double GrowthTarget::log_value(std::size_t k) const {
  long double kk = static_cast<long double>(std::max<std::size_t>(1, k));
  return std::log(static_cast<long double>(coef)) - static_cast<long double>(k) * rate.log() +
         alpha * std::log(kk) + beta * std::log(static_cast<long double>(log2_factor(k)));
}

BigInt GrowthTarget::exact_value(std::size_t k) const {
  if (!exact()) throw std::logic_error("growth target has no exact integer form");
  BigInt v = coef;
  v *= boost::multiprecision::pow(BigInt(int_base), static_cast<unsigned>(k));
  BigInt kk = std::max<std::size_t>(1, k);
  for (int i = 0; i < alpha; ++i) v *= kk;
  BigInt lf = log2_factor(k);
  for (int i = 0; i < beta; ++i) v *= lf;
  return v;
}

long double GrowthTarget::step_ratio(std::size_t k) const {
  long double r = std::exp(-rate.log());
  if (k >= 2) {
    long double a = static_cast<long double>(k) / static_cast<long double>(k - 1);
    r *= std::pow(a, static_cast<long double>(alpha));
  }
  long double lb = static_cast<long double>(log2_factor(k)) / static_cast<long double>(log2_factor(k - 1));
  r *= std::pow(lb, static_cast<long double>(beta));
  return r;
}

std::string GrowthTarget::describe() const {
  std::ostringstream os;
  if (coef != 1) os << coef << "*";
  if (int_base) {
    os << int_base << "^k";
  } else {
    os << "(" << rate.str() << ")^-k";
  }
  if (alpha == 1) os << "*k";
  if (alpha > 1) os << "*k^" << alpha;
  if (beta == 1) os << "*log k";
  if (beta > 1) os << "*(log k)^" << beta;
  return os.str();
}

GrowthEnvelope GrowthEnvelope::scaled(long double factor) const {
  GrowthEnvelope e = *this;
  e.log_a += std::log(factor);
  e.log_upper += std::log(factor);
  return e;
}

namespace {

// log r and 1 - r for r = rate / p, computed without losing the offsets
struct RateRatio {
  int cmp;              // sign of p - rate
  long double one_minus;  // 1 - r
};

RateRatio rate_ratio(const GrowthEnvelope& env, const PreciseProb& p) {
  long double d = PreciseProb::difference(p, env.rate);
  RateRatio rr{};
  rr.cmp = d < 0.0L ? -1 : (d > 0.0L ? 1 : 0);
  rr.one_minus = d / p.value();
  return rr;
}

}  // namespace

std::optional<long double> series_tail_upper(const GrowthEnvelope& env, const PreciseProb& p,
                                             std::size_t m, int extra) {
  RateRatio rr = rate_ratio(env, p);
  if (rr.cmp < 0) return std::nullopt;
  const int s = env.alpha + extra;
  const long double inv_a = std::exp(-env.log_a);
  std::optional<long double> best;
  auto offer = [&](long double v) {
    if (std::isfinite(v) && v >= 0.0L && (!best || v < *best)) best = v;
  };
  const long double m1 = static_cast<long double>(m + 1);
  const long double lm1 = static_cast<long double>(log2_factor(m + 1));
  if (rr.cmp > 0) {
    long double log_r = std::log1p(-rr.one_minus);
    long double v = std::exp(m1 * log_r) / rr.one_minus * std::pow(m1, -static_cast<long double>(s)) *
                    std::pow(lm1, -static_cast<long double>(env.beta));
    offer(inv_a * v);
  }
  if (s > 1) {
    long double v;
    if (m == 0) {
      v = 1.0L + 1.0L / (s - 1);
    } else {
      v = std::pow(static_cast<long double>(m), 1.0L - s) / (s - 1) *
          std::pow(lm1, -static_cast<long double>(env.beta));
    }
    offer(inv_a * v);
  }
  if (s == 1 && env.beta > 1 && m >= 2) {
    long double lg = std::log2(static_cast<long double>(m));
    long double v = std::log(2.0L) * std::pow(lg, 1.0L - env.beta) / (env.beta - 1);
    offer(inv_a * v);
  }
  return best;
}

bool series_diverges(const GrowthEnvelope& env, const PreciseProb& p, int extra) {
  if (!env.has_upper()) return false;
  RateRatio rr = rate_ratio(env, p);
  if (rr.cmp < 0) return true;
  if (rr.cmp > 0) return false;
  const int s = env.alpha + extra;
  return s < 1 || (s == 1 && env.beta <= 1);
}

}  // namespace percotree

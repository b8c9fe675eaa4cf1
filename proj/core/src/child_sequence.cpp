#include "percotree/child_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "percotree/numeric.hpp"

namespace percotree {

struct ChildSequence::State {
  enum class Type { Constant, Periodic, Prefix, Growth };
  Type type = Type::Constant;
  std::vector<std::uint64_t> pattern;
  std::uint64_t tail = 1;
  std::optional<GrowthTarget> target;

  std::mutex mu;
  std::vector<std::uint64_t> c;
  std::vector<long double> logsize{0.0L};
  std::vector<BigInt> exact{BigInt(1)};
  std::vector<long double> pattern_log;  // log of partial products of pattern
  long double ratio = 1.0L;              // |G_k| / f(k) at the last computed level

  long double closed_log(std::size_t k) const {
    switch (type) {
      case Type::Constant:
        return static_cast<long double>(k) * std::log(static_cast<long double>(tail));
      case Type::Periodic: {
        std::size_t P = pattern.size();
        return static_cast<long double>(k / P) * pattern_log[P] + pattern_log[k % P];
      }
      case Type::Prefix: {
        std::size_t L = pattern.size();
        if (k <= L) return pattern_log[k];
        return pattern_log[L] + static_cast<long double>(k - L) * std::log(static_cast<long double>(tail));
      }
      case Type::Growth:
        break;
    }
    return 0.0L;
  }

  std::uint64_t pattern_children(std::size_t k) const {
    switch (type) {
      case Type::Constant:
        return tail;
      case Type::Periodic:
        return pattern[k % pattern.size()];
      case Type::Prefix:
        return k < pattern.size() ? pattern[k] : tail;
      case Type::Growth:
        break;
    }
    return 1;
  }

  void ensure(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu);
    if (n > c.capacity()) c.reserve(std::max(n, 2 * c.capacity()));
    while (c.size() < n) {
      std::size_t k = c.size() + 1;  // computing c(k-1), hence level k
      std::uint64_t ck;
      if (type != Type::Growth) {
        ck = pattern_children(k - 1);
        c.push_back(ck);
        logsize.push_back(closed_log(k));
      } else {
        const GrowthTarget& f = *target;
        if (k <= kExactLimit) {
          const BigInt& prev = exact.back();
          if (f.exact()) {
            BigInt fk = f.exact_value(k);
            BigInt q = (fk + prev - 1) / prev;
            ck = q < 1 ? 1 : q.convert_to<std::uint64_t>();
          } else {
            long double lx = f.log_value(k) - big_log(prev);
            ck = tie_ceil(std::exp(lx));
          }
          exact.push_back(prev * ck);
          c.push_back(ck);
          long double lg = big_log(exact.back());
          logsize.push_back(lg);
          ratio = std::exp(lg - f.log_value(k));
        } else {
          long double x = f.step_ratio(k) / ratio;
          ck = tie_ceil(x);
          ratio = static_cast<long double>(ck) / x;
          c.push_back(ck);
          logsize.push_back(std::log(ratio) + f.log_value(k));
        }
      }
      if (type != Type::Growth && k <= kExactLimit) exact.push_back(exact.back() * ck);
    }
  }
};

namespace {

std::shared_ptr<ChildSequence::State> make_pattern_state(ChildSequence::State::Type type,
                                                         std::vector<std::uint64_t> pattern,
                                                         std::uint64_t tail) {
  auto s = std::make_shared<ChildSequence::State>();
  s->type = type;
  s->pattern = std::move(pattern);
  s->tail = tail;
  s->pattern_log.push_back(0.0L);
  for (auto v : s->pattern) s->pattern_log.push_back(s->pattern_log.back() + std::log(static_cast<long double>(v)));
  return s;
}

void require_positive(const std::vector<std::uint64_t>& v, const char* what) {
  for (auto x : v)
    if (x == 0) throw std::invalid_argument(std::string(what) + ": child counts must be >= 1");
}

}  // namespace

ChildSequence ChildSequence::constant(std::uint64_t c) {
  if (c == 0) throw std::invalid_argument("constant: child count must be >= 1");
  return ChildSequence(make_pattern_state(State::Type::Constant, {}, c), 1);
}

ChildSequence ChildSequence::periodic(std::vector<std::uint64_t> period) {
  if (period.empty()) throw std::invalid_argument("periodic: empty period");
  require_positive(period, "periodic");
  return ChildSequence(make_pattern_state(State::Type::Periodic, std::move(period), 1), 1);
}

ChildSequence ChildSequence::prefix_then_constant(std::vector<std::uint64_t> prefix, std::uint64_t tail) {
  require_positive(prefix, "explicit");
  if (tail == 0) throw std::invalid_argument("explicit: tail child count must be >= 1");
  return ChildSequence(make_pattern_state(State::Type::Prefix, std::move(prefix), tail), 1);
}

ChildSequence ChildSequence::growth(const GrowthTarget& f) {
  auto s = std::make_shared<State>();
  s->type = State::Type::Growth;
  s->target = f;
  return ChildSequence(std::move(s), 1);
}

ChildSequence ChildSequence::with_root_multiplier(std::uint64_t m) const {
  if (m == 0) throw std::invalid_argument("root multiplier must be >= 1");
  return ChildSequence(state_, mult_ * m);
}

std::uint64_t ChildSequence::children(std::size_t k) const {
  state_->ensure(k + 1);
  std::lock_guard<std::mutex> lock(state_->mu);
  std::uint64_t c = state_->c[k];
  return k == 0 ? c * mult_ : c;
}

std::vector<std::uint64_t> ChildSequence::children_upto(std::size_t n) const {
  state_->ensure(n);
  std::lock_guard<std::mutex> lock(state_->mu);
  std::vector<std::uint64_t> out(state_->c.begin(), state_->c.begin() + static_cast<std::ptrdiff_t>(n));
  if (n > 0) out[0] *= mult_;
  return out;
}

BigInt ChildSequence::level_size(std::size_t k) const {
  if (k > kExactLimit) throw std::out_of_range("exact level sizes are kept up to level 4096");
  state_->ensure(k);
  std::lock_guard<std::mutex> lock(state_->mu);
  BigInt v = state_->exact[k];
  if (k > 0) v *= mult_;
  return v;
}

long double ChildSequence::log_level_size(std::size_t k) const {
  state_->ensure(k);
  std::lock_guard<std::mutex> lock(state_->mu);
  long double v = state_->logsize[k];
  if (k > 0) v += std::log(static_cast<long double>(mult_));
  return v;
}

std::vector<long double> ChildSequence::log_level_sizes(std::size_t n) const {
  state_->ensure(n);
  std::lock_guard<std::mutex> lock(state_->mu);
  std::vector<long double> out(state_->logsize.begin(), state_->logsize.begin() + static_cast<std::ptrdiff_t>(n + 1));
  long double lm = std::log(static_cast<long double>(mult_));
  for (std::size_t k = 1; k <= n; ++k) out[k] += lm;
  return out;
}

const std::optional<GrowthTarget>& ChildSequence::target() const { return state_->target; }

std::string ChildSequence::rule_type() const {
  switch (state_->type) {
    case State::Type::Constant:
      return "constant";
    case State::Type::Periodic:
      return "periodic";
    case State::Type::Prefix:
      return "explicit";
    case State::Type::Growth:
      return "growth";
  }
  return "?";
}

const std::vector<std::uint64_t>& ChildSequence::pattern() const { return state_->pattern; }
std::uint64_t ChildSequence::tail() const { return state_->tail; }

std::optional<GrowthEnvelope> ChildSequence::envelope() const {
  const State& s = *state_;
  GrowthEnvelope env;
  switch (s.type) {
    case State::Type::Constant:
      env.rate = PreciseProb(1.0L / static_cast<long double>(s.tail));
      env.log_a = 0.0L;
      env.log_upper = 0.0L;
      break;
    case State::Type::Periodic: {
      std::size_t P = s.pattern.size();
      long double lg = s.pattern_log[P] / static_cast<long double>(P);
      env.rate = PreciseProb(std::exp(-lg));
      long double lo = 0.0L, hi = 0.0L;
      for (std::size_t r = 0; r < P; ++r) {
        long double v = s.pattern_log[r] - lg * static_cast<long double>(r);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      env.log_a = lo - 1e-15L;
      env.log_upper = hi + 1e-15L;
      break;
    }
    case State::Type::Prefix: {
      std::size_t L = s.pattern.size();
      long double lt = std::log(static_cast<long double>(s.tail));
      env.rate = PreciseProb(1.0L / static_cast<long double>(s.tail));
      long double lo = s.pattern_log[L] - lt * static_cast<long double>(L), hi = lo;
      for (std::size_t k = 1; k <= L; ++k) {
        long double v = s.pattern_log[k] - lt * static_cast<long double>(k);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      env.log_a = lo;
      env.log_upper = hi;
      break;
    }
    case State::Type::Growth: {
      const GrowthTarget& f = *s.target;
      env.rate = f.rate;
      env.alpha = f.alpha;
      env.beta = f.beta;
      long double lc = std::log(static_cast<long double>(f.coef));
      env.log_a = lc + std::log1p(-1e-12L);
      long double b = std::exp(-f.rate.log());
      long double a1 = static_cast<long double>(children(0) / mult_) / std::exp(f.log_value(1));
      long double A = std::max(a1, b / (b - 1.0L)) * (1.0L + 1e-12L);
      env.log_upper = lc + std::log(A);
      break;
    }
  }
  if (mult_ != 1) env = env.scaled(static_cast<long double>(mult_));
  return env;
}

std::optional<long double> ChildSequence::subtree_resistance_upper(std::size_t m, const PreciseProb& p,
                                                                   std::size_t explicit_terms) const {
  auto env = envelope();
  if (!env) return std::nullopt;
  std::size_t top = m + explicit_terms;
  auto tail = series_tail_upper(*env, p, top, 0);
  if (!tail) return std::nullopt;
  auto ls = log_level_sizes(top);
  const long double lp = p.log();
  long double sum = 0.0L;
  for (std::size_t k = m + 1; k <= top; ++k)
    sum += std::exp(-static_cast<long double>(k - m) * lp + ls[m] - ls[k]);
  sum += std::exp(static_cast<long double>(m) * lp + ls[m]) * *tail;
  return sum * (1.0L + 1e-12L);
}

std::string ChildSequence::describe() const {
  std::ostringstream os;
  const State& s = *state_;
  switch (s.type) {
    case State::Type::Constant:
      os << "constant(" << s.tail << ")";
      break;
    case State::Type::Periodic:
    case State::Type::Prefix: {
      os << (s.type == State::Type::Periodic ? "periodic(" : "explicit(");
      for (std::size_t i = 0; i < s.pattern.size(); ++i) os << (i ? "," : "") << s.pattern[i];
      if (s.type == State::Type::Prefix) os << ";" << s.tail;
      os << ")";
      break;
    }
    case State::Type::Growth:
      os << "growth(" << s.target->describe() << ")";
      break;
  }
  if (mult_ != 1) os << "x" << mult_;
  return os.str();
}

}  // namespace percotree

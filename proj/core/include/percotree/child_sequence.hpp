#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "percotree/growth.hpp"

namespace percotree {

// Children-per-vertex counts c(k) of a spherically symmetric tree, realized
// lazily and memoized behind a mutex.
class ChildSequence {
 public:
  static constexpr std::size_t kExactLimit = 4096;

  static ChildSequence constant(std::uint64_t c);
  static ChildSequence periodic(std::vector<std::uint64_t> period);
  static ChildSequence prefix_then_constant(std::vector<std::uint64_t> prefix, std::uint64_t tail);
  static ChildSequence growth(const GrowthTarget& f);

  // Glues m copies at the root: c(0) is multiplied by m.
  ChildSequence with_root_multiplier(std::uint64_t m) const;

  std::uint64_t children(std::size_t k) const;
  std::vector<std::uint64_t> children_upto(std::size_t n) const;  // c(0..n-1)

  BigInt level_size(std::size_t k) const;  // exact, k <= kExactLimit
  long double log_level_size(std::size_t k) const;
  std::vector<long double> log_level_sizes(std::size_t n) const;  // k = 0..n

  std::uint64_t root_multiplier() const { return mult_; }
  const std::optional<GrowthTarget>& target() const;
  std::optional<GrowthEnvelope> envelope() const;
  std::string describe() const;
  std::string rule_type() const;
  const std::vector<std::uint64_t>& pattern() const;  // period or prefix
  std::uint64_t tail() const;

  // Upper bound on p^m sum_{k>m} p^-k |G_m| / |G_k|, the resistance of the
  // subtree below a level-m vertex in units of its own root edge scale.
  std::optional<long double> subtree_resistance_upper(std::size_t m, const PreciseProb& p,
                                                      std::size_t explicit_terms = 256) const;

  bool same_rule(const ChildSequence& other) const { return state_ == other.state_ && mult_ == other.mult_; }

  struct State;

 private:
  ChildSequence(std::shared_ptr<State> s, std::uint64_t mult) : state_(std::move(s)), mult_(mult) {}
  std::shared_ptr<State> state_;
  std::uint64_t mult_ = 1;
};

}  // namespace percotree

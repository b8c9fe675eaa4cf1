#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "percotree/criteria.hpp"

namespace percotree {

// c(k-1) = min{i >= 1 : i |G_{k-1}| >= f(k)}
ChildSequence ss_tree_with_growth(const GrowthTarget& f);

// "binary", "two-n-log-n", "n-two-n", "n2-two-n", "n-log2-two-n"
ChildSequence named_growth_tree(const std::string& name);
std::vector<std::string> named_growth_trees();

struct Lemma23Result {
  GeneralTree tree;
  ChildSequence base = ChildSequence::constant(1);  // G'
  std::uint64_t j = 1;
  ThetaBracket theta_prime;
  long double theta_glued_lo = 0;
  PcEstimate pc;
  bool ok = false;
  std::string note;

  nlohmann::json to_json() const;
};

Lemma23Result lemma23_tree(const PreciseProb& p, long double q,
                           std::size_t depth_budget = kSphericalDepthBudget);

// p_i = 1/2 + B^-i
struct PiRule {
  long double B = 3.0L;

  PreciseProb p(std::size_t i) const;
  std::size_t max_index() const;  // last i with B^-i representable
  std::string describe() const;
};

GeneralTree theorem12_counterexample(const PiRule& rule = {},
                                     std::size_t depth_budget = kSphericalDepthBudget);

struct Remark24Report {
  ChildSequence gamma = ChildSequence::constant(1);
  GeneralTree gamma_prime;
  PiRule rule;
  PreciseProb p_star;
  std::vector<long double> grid;  // offsets above 1/2
  std::vector<long double> theta_gamma_hi;
  std::vector<long double> theta_gamma_prime_lo;
  bool grid_ok = false;
  std::size_t attempts = 0;
  std::vector<std::string> attempt_log;

  PcEstimate pc_gamma;
  PcEstimate pc_gamma_prime;
  bool pc_ok = false;

  std::vector<std::pair<std::size_t, long double>> decay_gamma;
  std::vector<std::pair<std::size_t, long double>> decay_gamma_prime;
  bool zero_certified_gamma = false;
  bool zero_certified_gamma_prime = false;
  bool decay_ok = false;

  std::optional<ExceptionalTimesVerdict> verdict_gamma;
  std::optional<ExceptionalTimesVerdict> verdict_gamma_prime;
  bool verdicts_ok = false;

  bool ok() const { return grid_ok && pc_ok && decay_ok && verdicts_ok; }
  nlohmann::json to_json() const;
};

struct Remark24Options {
  std::size_t gamma_depth = std::size_t{1} << 20;
  std::size_t gamma_prime_depth = 64;
  std::size_t grid_points = 20;
  std::size_t retries = 6;
  std::size_t cstar_depth = 256;
};

Remark24Report remark24_pair(const Remark24Options& opts = {});

}  // namespace percotree

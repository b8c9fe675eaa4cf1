#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "percotree/networks.hpp"

namespace percotree {

inline constexpr std::size_t kSphericalDepthBudget = std::size_t{1} << 14;
inline constexpr std::size_t kGeneralDepthBudget = 256;

// Probability that the root reaches level n through open edges.
long double theta_truncated(const ChildSequence& seq, const PreciseProb& p, std::size_t n);
long double theta_truncated(const KindLayers& layers, const PreciseProb& p);
long double theta_truncated(const TreeTruncation& t, const PreciseProb& p);
long double theta_truncated(const GeneralTree& tree, const PreciseProb& p, std::size_t n);

// Rigorous lower bound on theta: the same recursion seeded at level n with
// C/(1+C) from Lyons-corrected subtree conductance lower bounds.
long double theta_lower(const ChildSequence& seq, const PreciseProb& p, std::size_t n);
long double theta_lower(const KindLayers& layers, const PreciseProb& p);
long double theta_lower(const GeneralTree& tree, const PreciseProb& p, std::size_t n);

struct ThetaBracket {
  long double lo = 0;
  long double hi = 1;
  long double extrapolate = 0;  // Aitken, not rigorous
  std::size_t depth = 0;
  bool lo_rigorous = false;
  bool budget_exhausted = false;
  std::vector<std::pair<std::size_t, long double>> sequence;
};

ThetaBracket theta_limit(const GeneralTree& tree, const PreciseProb& p, long double tol,
                         std::optional<std::size_t> depth_budget = std::nullopt);
ThetaBracket theta_limit(const ChildSequence& seq, const PreciseProb& p, long double tol,
                         std::size_t depth_budget = kSphericalDepthBudget);

struct McEstimate {
  double estimate = 0;
  double std_error = 0;
  std::uint64_t replicas = 0;
  std::uint64_t successes = 0;
};

inline constexpr std::uint64_t kMcBlock = 4096;

// Replicas are split into blocks of kMcBlock, each with its own generator
// seeded from (seed, block); results are merged by block index.
McEstimate theta_mc(const TreeTruncation& t, double p, std::uint64_t replicas, std::uint64_t seed,
                    unsigned threads = 1);

struct PcEstimate {
  long double estimate = 0;
  long double lo = 0;
  long double hi = 1;
  std::string method;
  std::size_t depth = 0;
  bool rigorous = false;
  bool degenerate = false;  // estimate at 0 or 1
};

PcEstimate branching_pc(const ChildSequence& seq, std::size_t K);
PcEstimate branching_pc(const GeneralTree& tree, std::size_t K,
                        std::size_t bisection_depth = 64);

enum class SandwichVerdict { Holds, Violated, Inconclusive };
std::string to_string(SandwichVerdict v);

struct SandwichResult {
  long double lower = 0;  // C_lo/(1+C_lo)
  long double upper = 1;  // min(1, 2 C_hi/(1+C_hi))
  long double theta_lo = 0;
  long double theta_hi = 1;
  long double c_lo = 0;
  long double c_hi = 0;
  bool c_rigorous = false;
  Normalization normalization = Normalization::LyonsCorrected;
  SandwichVerdict verdict = SandwichVerdict::Inconclusive;
};

SandwichResult lyons_sandwich(const ChildSequence& seq, const PreciseProb& p, std::size_t n,
                              Normalization norm = Normalization::LyonsCorrected);
SandwichResult lyons_sandwich(const GeneralTree& tree, const PreciseProb& p, std::size_t n,
                              Normalization norm = Normalization::LyonsCorrected);

void write_theta_csv_row(std::ostream& os, const std::string& tree_id, const PreciseProb& p, std::size_t n,
                         long double theta_n, const std::optional<long double>& lo,
                         const std::optional<long double>& hi, const std::string& method);

}  // namespace percotree

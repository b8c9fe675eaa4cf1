#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "percotree/percolation.hpp"

namespace percotree {

enum class Verdict { Divergent, Convergent, Inconclusive };
std::string to_string(Verdict v);

struct DivergenceDiagnosis {
  Verdict verdict = Verdict::Inconclusive;
  bool rigorous = false;
  std::string method;
  std::vector<std::pair<long double, long double>> evidence;
  std::optional<long double> tail_bound;
  std::optional<long double> exponent;
  nlohmann::json params = nlohmann::json::object();
  std::string note;

  nlohmann::json to_json() const;
};

class Inapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SeriesOptions {
  std::size_t K = 10000;
  long double delta = 0.05L;
};

// S_k = sum_{j<=k} p_c^-j / (j |G_j|), k = 1..K (index 0 holds 0)
std::vector<long double> series_partial_sums(const ChildSequence& seq, const PreciseProb& pc, std::size_t K);
DivergenceDiagnosis series_criterion_ss(const ChildSequence& seq, const PreciseProb& pc,
                                        const SeriesOptions& opts = {});

struct IntegralOptions {
  std::vector<long double> eps;  // decreasing; empty means (1-p_c) 2^-j, j = 0..20
  std::optional<std::size_t> depth;
  std::size_t quad_points = 16;
  long double lo_slope_max = 0.1L;
  long double hi_slope_min = 0.25L;
  std::size_t lo_fit = 4;
  std::size_t hi_fit = 10;
  long double resolve = 16.0L;  // lower route only uses eps >= resolve / depth
};

struct ThetaProvider {
  std::function<long double(const PreciseProb&)> upper;
  std::function<long double(const PreciseProb&)> lower;
  std::size_t depth = 0;
};

ThetaProvider theta_provider(const GeneralTree& tree, std::size_t depth);
DivergenceDiagnosis integral_reciprocal_theta(const ThetaProvider& theta, const PreciseProb& pc,
                                              const IntegralOptions& opts = {});
DivergenceDiagnosis integral_reciprocal_theta(const GeneralTree& tree, const PreciseProb& pc,
                                              const IntegralOptions& opts = {});

struct CStarOptions {
  std::size_t K = 10000;    // spherically symmetric closed form
  std::size_t depth = 1024;  // general trees, layered reduction
  long double delta = 0.05L;
};

DivergenceDiagnosis cstar_zero_test(const ChildSequence& seq, const PreciseProb& pc, const CStarOptions& opts = {});
DivergenceDiagnosis cstar_zero_test(const GeneralTree& tree, const PreciseProb& pc, const CStarOptions& opts = {});

struct FubiniResult {
  long double numeric = 0;
  long double closed_form = 0;
  long double residual = 0;  // |numeric - closed| / max(1, |closed|)
};

FubiniResult fubini_identity_check(std::size_t k, const PreciseProb& pc);

struct EnergyChainRow {
  std::size_t n = 0;
  long double lhs = 0;      // int_{p_c}^1 dp / C_n(p)
  long double bound_n = 0;  // p_c sum_{k<=n} k(1-p_c^{k-1})/(k-1) W*_n(k)
  long double slack = 0;    // bound_K + tail - lhs
  bool holds = false;
};

struct EnergyChainReport {
  std::size_t K = 0;
  std::vector<long double> wstar;  // W*(k) of the depth-K minimal flow, index 0 unused
  long double bound_K = 0;
  long double tail = 0;
  bool tail_rigorous = false;
  long double cstar_lo = 0;
  std::vector<EnergyChainRow> rows;
  bool all_hold = false;
  long double min_slack = 0;
  nlohmann::json to_json() const;
};

// Throws Inapplicable when the C*(p_c) bracket contains 0.
EnergyChainReport energy_bound_chain(const GeneralTree& tree, const PreciseProb& pc, std::size_t K = 100);

enum class ExceptionalVerdict { NoExceptionalTimes, ExceptionalTimesExist, Inconclusive };
std::string to_string(ExceptionalVerdict v);

struct VerdictOptions {
  SeriesOptions series;
  IntegralOptions integral;
  CStarOptions cstar;
  bool run_integral = true;
  std::size_t theta_depth = 0;  // 0: budget default per tree type
};

struct ExceptionalTimesVerdict {
  ExceptionalVerdict verdict = ExceptionalVerdict::Inconclusive;
  std::optional<DivergenceDiagnosis> series;
  std::optional<DivergenceDiagnosis> integral;
  std::optional<DivergenceDiagnosis> cstar;
  bool spherical = false;
  bool pc_in_unit = false;
  bool theta_zero_certified = false;
  bool theta_decreasing = false;
  std::vector<std::pair<std::size_t, long double>> theta_at_pc;
  std::string justification;
  bool contradiction = false;
  std::string diagnostic;

  nlohmann::json to_json() const;
};

ExceptionalTimesVerdict exceptional_times_verdict(const GeneralTree& tree, const PreciseProb& pc,
                                                  const VerdictOptions& opts = {});

}  // namespace percotree

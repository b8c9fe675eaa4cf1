#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "percotree/truncation.hpp"

namespace percotree {

enum class ConductanceKind { Percolation, Dynamical, Custom };
enum class Normalization { PaperLiteral, LyonsCorrected };

std::string to_string(ConductanceKind k);
std::string to_string(Normalization n);
ConductanceKind parse_kind(const std::string& s);
Normalization parse_normalization(const std::string& s);

struct ConductanceModel {
  ConductanceKind kind = ConductanceKind::Percolation;
  Normalization normalization = Normalization::PaperLiteral;
  PreciseProb p{0.5L};

  // conductance of an edge whose child endpoint is at level k >= 1
  long double at_level(std::size_t k) const;
  void validate() const;
};

class WeightedNetwork {
 public:
  WeightedNetwork(std::shared_ptr<const TreeTruncation> trunc, const ConductanceModel& model);
  static WeightedNetwork custom(std::shared_ptr<const TreeTruncation> trunc, std::vector<long double> conductance);

  const TreeTruncation& truncation() const { return *trunc_; }
  const std::shared_ptr<const TreeTruncation>& truncation_ptr() const { return trunc_; }
  const std::vector<long double>& conductance() const { return c_; }
  long double conductance(std::size_t e) const { return c_[e]; }
  const ConductanceModel& model() const { return model_; }

 private:
  WeightedNetwork() = default;
  std::shared_ptr<const TreeTruncation> trunc_;
  std::vector<long double> c_;
  ConductanceModel model_;
};

struct UnitFlow {
  std::shared_ptr<const TreeTruncation> trunc;
  std::vector<long double> flow;  // per edge
};

// Largest violation of the unit-flow conditions: root outflow 1, and inflow
// equal to outflow at every internal non-root vertex.
long double unit_flow_violation(const UnitFlow& f);

// Closed form (sum_{k<=n} p^-k / (k^[dyn] |G_k|))^-1, with the (1-p) divisor when
// Lyons-corrected.
long double effective_conductance_ss(const ChildSequence& seq, const ConductanceModel& model, std::size_t n);

struct ConductanceBracket {
  std::size_t n = 0;
  long double value = 0;  // C_n, wired boundary
  long double lo = 0;     // rigorous lower bound on the limit (0 when none)
  long double hi = 0;     // = value, an upper bound on the limit
  bool rigorous = false;
};

// C_1..C_n with analytic tail brackets where the growth envelope allows.
std::vector<ConductanceBracket> conductance_sequence_ss(const ChildSequence& seq, const ConductanceModel& model,
                                                        std::size_t n);
ConductanceBracket conductance_bracket_ss(const ChildSequence& seq, const ConductanceModel& model, std::size_t n);

long double effective_conductance_reduce(const WeightedNetwork& net);
// Per-edge conductance of the branch hanging from each edge (edge in series with its subtree).
std::vector<long double> branch_conductances(const WeightedNetwork& net);

enum class Boundary { Wired, LowerBound };

// Reduction over deduplicated kind layers. LowerBound replaces the wired
// boundary by rule-provided subtree resistance bounds (0 conductance when absent).
long double effective_conductance_layered(const KindLayers& layers, const ConductanceModel& model,
                                          Boundary boundary = Boundary::Wired);

UnitFlow min_energy_unit_flow(const WeightedNetwork& net);
long double flow_energy(const UnitFlow& flow, const WeightedNetwork& net);
std::vector<long double> energy_by_level(const UnitFlow& flow, const WeightedNetwork& net);  // index 0 unused

// Sum over level-k edges of F(e)^2 for the minimal-energy flow of the layered
// network; index 0 unused.
std::vector<long double> level_flow_squares(const KindLayers& layers, const ConductanceModel& model);

void write_conductance_csv_rows(std::ostream& os, const std::string& tree_id, const ConductanceModel& model,
                                const std::vector<ConductanceBracket>& rows);

}  // namespace percotree

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include <json.hpp>

#include "percotree/truncation.hpp"

namespace percotree {

// Root-to-boundary indicator over [0, T].
struct Timeline {
  double horizon = 0;
  bool initial = false;
  std::vector<std::pair<double, bool>> events;  // (time, new value)

  bool value_at(double t) const;
  bool final_value() const { return events.empty() ? initial : events.back().second; }
  bool valid() const;
};

// Event-driven dynamical percolation on a truncation. Each edge is a
// two-state chain, on at rate p and off at rate 1-p, started stationary.
class Simulator {
 public:
  Simulator(const TreeTruncation& t, double p, std::uint64_t seed);

  double now() const { return now_; }
  double next_time() const;  // +inf without edges
  std::size_t step();        // applies the next flip, returns its edge
  bool connected() const { return conn_[0] != 0; }
  bool edge_open(std::size_t e) const { return open_[e] != 0; }
  bool connected_from_scratch() const;
  std::size_t edge_count() const { return open_.size(); }

 private:
  void set_edge(std::size_t e, bool on);

  const TreeTruncation& t_;
  double p_;
  std::mt19937_64 rng_;
  double now_ = 0;
  std::vector<std::uint8_t> open_;
  std::vector<std::uint8_t> conn_;
  std::vector<std::uint32_t> good_;
  using Event = std::pair<double, std::uint32_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
};

struct SimulateOptions {
  std::size_t probes = 0;     // from-scratch checks at uniform times
  bool track_edges = false;   // per-edge on-time and flip counts
};

struct SimulationResult {
  Timeline timeline;
  std::uint64_t flips = 0;
  std::size_t probes_checked = 0;
  std::size_t probe_mismatches = 0;
  std::vector<double> edge_on_time;
  std::vector<std::uint64_t> edge_off_flips;  // on -> off transitions
};

SimulationResult simulate(const TreeTruncation& t, double p, double T, std::uint64_t seed,
                          const SimulateOptions& opts = {});

double occupation_fraction(const Timeline& tl);

struct SwitchStatistics {
  std::size_t count = 0;
  std::optional<double> mean_on;
  std::optional<double> mean_off;
};

// Mean interval lengths use complete intervals between two events only.
SwitchStatistics switch_statistics(const Timeline& tl);

struct EdgeMarginalReport {
  double p = 0;
  double horizon = 0;
  double tolerance = 0;
  std::vector<double> fractions;
  std::size_t passed = 0;
  double pass_rate = 0;
  bool passes = false;
  bool insufficient_horizon = false;

  nlohmann::json to_json() const;
};

EdgeMarginalReport edge_marginal_check(const TreeTruncation& t, double p, double T, std::uint64_t seed);

struct ReplicaStats {
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  double occupation = 0;
  std::size_t switches = 0;
  std::optional<double> mean_on;
  std::optional<double> mean_off;
};

// Replica r uses stream_seed(seed, r); output ordered by replica.
std::vector<ReplicaStats> simulate_replicas(const TreeTruncation& t, double p, double T, std::uint64_t seed,
                                            std::size_t replicas, unsigned threads = 1,
                                            std::vector<Timeline>* timelines = nullptr);

}  // namespace percotree

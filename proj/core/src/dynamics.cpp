#include "percotree/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "percotree/rng.hpp"

namespace percotree {

bool Timeline::value_at(double t) const {
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double x, const std::pair<double, bool>& e) { return x < e.first; });
  return it == events.begin() ? initial : std::prev(it)->second;
}

bool Timeline::valid() const {
  bool cur = initial;
  double last = 0.0;
  for (const auto& [t, v] : events) {
    if (!(t > last) || t > horizon || v == cur) return false;
    last = t;
    cur = v;
  }
  return true;
}

Simulator::Simulator(const TreeTruncation& t, double p, std::uint64_t seed)
    : t_(t), p_(p), rng_(stream_seed(seed, 0)) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("simulate: p must lie in (0,1)");
  const std::size_t E = t.edge_count(), V = t.vertex_count();
  open_.assign(E, 0);
  for (std::size_t e = 0; e < E; ++e) open_[e] = unit_uniform(rng_) < p ? 1 : 0;
  for (std::size_t e = 0; e < E; ++e)
    queue_.emplace(exponential(rng_, open_[e] ? 1.0 - p : p), static_cast<std::uint32_t>(e));
  conn_.assign(V, 0);
  good_.assign(V, 0);
  for (std::size_t v = V; v-- > 0;) {
    auto u = static_cast<std::uint32_t>(v);
    conn_[v] = t.is_boundary(u) || good_[v] > 0;
    if (v > 0 && conn_[v] && open_[v - 1]) ++good_[t.parent[v]];
  }
}

double Simulator::next_time() const {
  return queue_.empty() ? std::numeric_limits<double>::infinity() : queue_.top().first;
}

void Simulator::set_edge(std::size_t e, bool on) {
  if (static_cast<bool>(open_[e]) == on) return;
  open_[e] = on;
  std::uint32_t c = static_cast<std::uint32_t>(e + 1);
  if (!conn_[c]) return;
  // contribution of c to its parent changed; walk up while connectivity flips
  for (;;) {
    std::uint32_t v = t_.parent[c];
    bool contributes = open_[c - 1] && conn_[c];
    if (contributes) {
      ++good_[v];
    } else {
      --good_[v];
    }
    bool now = t_.is_boundary(v) || good_[v] > 0;
    if (now == static_cast<bool>(conn_[v])) return;
    conn_[v] = now;
    if (v == 0 || !open_[v - 1]) return;
    c = v;
  }
}

std::size_t Simulator::step() {
  if (queue_.empty()) return open_.size();
  auto [time, e] = queue_.top();
  queue_.pop();
  now_ = time;
  bool on = !open_[e];
  set_edge(e, on);
  queue_.emplace(time + exponential(rng_, on ? 1.0 - p_ : p_), e);
  return e;
}

bool Simulator::connected_from_scratch() const {
  const std::size_t V = t_.vertex_count();
  std::vector<std::uint8_t> c(V, 0);
  for (std::size_t v = V; v-- > 0;) {
    if (t_.is_boundary(static_cast<std::uint32_t>(v))) {
      c[v] = 1;
      continue;
    }
    for (std::uint32_t w = t_.first_child[v]; w < t_.first_child[v + 1]; ++w) {
      if (open_[w - 1] && c[w]) {
        c[v] = 1;
        break;
      }
    }
  }
  return c[0] != 0;
}

SimulationResult simulate(const TreeTruncation& t, double p, double T, std::uint64_t seed,
                          const SimulateOptions& opts) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("simulate: T must be positive");
  Simulator sim(t, p, seed);
  SimulationResult r;
  r.timeline.horizon = T;
  r.timeline.initial = sim.connected();
  const std::size_t E = sim.edge_count();
  std::vector<double> since;
  if (opts.track_edges) {
    r.edge_on_time.assign(E, 0.0);
    r.edge_off_flips.assign(E, 0);
    since.assign(E, 0.0);
  }
  std::vector<double> probes;
  if (opts.probes) {
    std::mt19937_64 g(stream_seed(seed, 1));
    for (std::size_t i = 0; i < opts.probes; ++i) probes.push_back(unit_uniform(g) * T);
    std::sort(probes.begin(), probes.end());
  }
  std::size_t next_probe = 0;
  bool cur = r.timeline.initial;
  auto run_probes = [&](double limit) {
    while (next_probe < probes.size() && probes[next_probe] < limit) {
      ++r.probes_checked;
      if (sim.connected() != sim.connected_from_scratch()) ++r.probe_mismatches;
      ++next_probe;
    }
  };
  while (sim.next_time() <= T) {
    double tn = sim.next_time();
    run_probes(tn);
    std::size_t e = sim.step();
    ++r.flips;
    if (opts.track_edges) {
      if (sim.edge_open(e)) {
        since[e] = tn;
      } else {
        r.edge_on_time[e] += tn - since[e];
        ++r.edge_off_flips[e];
      }
    }
    bool now = sim.connected();
    if (now != cur) {
      r.timeline.events.emplace_back(tn, now);
      cur = now;
    }
  }
  run_probes(std::numeric_limits<double>::infinity());
  if (opts.track_edges)
    for (std::size_t e = 0; e < E; ++e)
      if (sim.edge_open(e)) r.edge_on_time[e] += T - since[e];
  return r;
}

double occupation_fraction(const Timeline& tl) {
  if (!(tl.horizon > 0.0)) throw std::invalid_argument("occupation_fraction: empty horizon");
  double on = 0.0, last = 0.0;
  bool cur = tl.initial;
  for (const auto& [t, v] : tl.events) {
    if (cur) on += t - last;
    last = t;
    cur = v;
  }
  if (cur) on += tl.horizon - last;
  return on / tl.horizon;
}

SwitchStatistics switch_statistics(const Timeline& tl) {
  SwitchStatistics s;
  s.count = tl.events.size();
  double on = 0.0, off = 0.0;
  std::size_t n_on = 0, n_off = 0;
  for (std::size_t i = 1; i < tl.events.size(); ++i) {
    double d = tl.events[i].first - tl.events[i - 1].first;
    if (tl.events[i - 1].second) {
      on += d;
      ++n_on;
    } else {
      off += d;
      ++n_off;
    }
  }
  if (n_on) s.mean_on = on / static_cast<double>(n_on);
  if (n_off) s.mean_off = off / static_cast<double>(n_off);
  return s;
}

nlohmann::json EdgeMarginalReport::to_json() const {
  return {{"p", p},
          {"horizon", horizon},
          {"tolerance", tolerance},
          {"edges", fractions.size()},
          {"passed", passed},
          {"pass_rate", pass_rate},
          {"passes", passes},
          {"insufficient_horizon", insufficient_horizon}};
}

EdgeMarginalReport edge_marginal_check(const TreeTruncation& t, double p, double T, std::uint64_t seed) {
  SimulateOptions o;
  o.track_edges = true;
  auto r = simulate(t, p, T, seed, o);
  EdgeMarginalReport rep;
  rep.p = p;
  rep.horizon = T;
  rep.tolerance = 4.0 * std::sqrt(2.0 * p * (1.0 - p) / T);
  rep.insufficient_horizon = 2.0 * p * (1.0 - p) * T < 10.0;
  for (double on : r.edge_on_time) {
    double f = on / T;
    rep.fractions.push_back(f);
    if (std::fabs(f - p) <= rep.tolerance) ++rep.passed;
  }
  rep.pass_rate = rep.fractions.empty() ? 1.0 : static_cast<double>(rep.passed) / static_cast<double>(rep.fractions.size());
  rep.passes = !rep.insufficient_horizon && rep.pass_rate >= 0.95;
  return rep;
}

std::vector<ReplicaStats> simulate_replicas(const TreeTruncation& t, double p, double T, std::uint64_t seed,
                                            std::size_t replicas, unsigned threads, std::vector<Timeline>* timelines) {
  std::vector<ReplicaStats> out(replicas);
  if (timelines) timelines->assign(replicas, Timeline{});
  auto run = [&](std::size_t r) {
    std::uint64_t s = stream_seed(seed, r);
    auto res = simulate(t, p, T, s);
    auto st = switch_statistics(res.timeline);
    out[r] = ReplicaStats{r, s, occupation_fraction(res.timeline), st.count, st.mean_on, st.mean_off};
    if (timelines) (*timelines)[r] = std::move(res.timeline);
  };
  if (threads <= 1 || replicas <= 1) {
    for (std::size_t r = 0; r < replicas; ++r) run(r);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < std::min<std::size_t>(threads, replicas); ++i)
    pool.emplace_back([&] {
      for (std::size_t r; (r = next.fetch_add(1)) < replicas;) run(r);
    });
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace percotree

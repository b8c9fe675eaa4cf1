#include "percotree/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "percotree/csv.hpp"
#include "percotree/rng.hpp"

namespace percotree {

namespace {

long double step(long double pg, long double mult) {
  if (pg >= 1.0L) return 1.0L;
  return -std::expm1(mult * std::log1p(-pg));
}

bool trivial_p(const PreciseProb& p, long double& out) {
  if (PreciseProb::compare(p, 0.0L) <= 0) {
    out = 0.0L;
    return true;
  }
  if (PreciseProb::compare(p, 1.0L) >= 0) {
    out = 1.0L;
    return true;
  }
  return false;
}

long double scalar_recursion(const std::vector<std::uint64_t>& c, long double p, std::size_t n, long double g) {
  for (std::size_t k = n; k-- > 0;) g = step(p * g, static_cast<long double>(c[k]));
  return g;
}

long double layered_recursion(const KindLayers& layers, long double p, std::vector<long double> g) {
  for (std::size_t k = layers.depth(); k-- > 0;) {
    const auto& L = layers.layers[k];
    std::vector<long double> up(L.kinds.size());
    for (std::size_t i = 0; i < L.kinds.size(); ++i) {
      long double lg = 0.0L;
      for (std::uint32_t j = L.child_begin[i]; j < L.child_begin[i + 1]; ++j) {
        long double pg = p * g[L.child_index[j]];
        if (pg >= 1.0L) {
          lg = -std::numeric_limits<long double>::infinity();
          break;
        }
        lg += static_cast<long double>(L.child_mult[j]) * std::log1p(-pg);
      }
      up[i] = -std::expm1(lg);
    }
    g = std::move(up);
  }
  return g[0];
}

long double lyons_seed(std::optional<long double> r, const PreciseProb& p) {
  if (!r) return 0.0L;
  return 1.0L / (1.0L + (1.0L - p.value()) * *r);
}

}  // namespace

long double theta_truncated(const ChildSequence& seq, const PreciseProb& p, std::size_t n) {
  long double t;
  if (trivial_p(p, t)) return t;
  if (n == 0) return 1.0L;
  return scalar_recursion(seq.children_upto(n), p.value(), n, 1.0L);
}

long double theta_truncated(const KindLayers& layers, const PreciseProb& p) {
  long double t;
  if (trivial_p(p, t)) return t;
  return layered_recursion(layers, p.value(), std::vector<long double>(layers.layers.back().kinds.size(), 1.0L));
}

long double theta_truncated(const TreeTruncation& tr, const PreciseProb& p) {
  long double t;
  if (trivial_p(p, t)) return t;
  const long double pv = p.value();
  std::vector<long double> g(tr.vertex_count(), 1.0L);
  for (std::size_t v = tr.level_offset[tr.depth]; v-- > 0;) {
    long double lg = 0.0L;
    for (std::uint32_t w = tr.first_child[v]; w < tr.first_child[v + 1]; ++w) lg += std::log1p(-pv * g[w]);
    g[v] = -std::expm1(lg);
  }
  return g[0];
}

long double theta_truncated(const GeneralTree& tree, const PreciseProb& p, std::size_t n) {
  tree.check_depth(n);
  if (const ChildSequence* s = tree.as_spherical()) return theta_truncated(*s, p, n);
  return theta_truncated(build_layers(tree, n), p);
}

long double theta_lower(const ChildSequence& seq, const PreciseProb& p, std::size_t n) {
  long double t;
  if (trivial_p(p, t)) return t;
  long double g = lyons_seed(seq.subtree_resistance_upper(n, p), p);
  if (n == 0) return g;
  return scalar_recursion(seq.children_upto(n), p.value(), n, g);
}

long double theta_lower(const KindLayers& layers, const PreciseProb& p) {
  long double t;
  if (trivial_p(p, t)) return t;
  const auto& last = layers.layers.back();
  std::vector<long double> g(last.kinds.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = lyons_seed(layers.rule->resistance_upper(last.kinds[i], p), p);
  if (layers.depth() == 0) return g[0];
  return layered_recursion(layers, p.value(), std::move(g));
}

long double theta_lower(const GeneralTree& tree, const PreciseProb& p, std::size_t n) {
  tree.check_depth(n);
  if (const ChildSequence* s = tree.as_spherical()) return theta_lower(*s, p, n);
  return theta_lower(build_layers(tree, n), p);
}

namespace {

// nothing when the last three values are not a convex decreasing run
std::optional<long double> aitken(long double a, long double b, long double c) {
  if (b == c) return c;
  long double d2 = c - 2.0L * b + a;
  if (!(d2 > 0.0L) || c > b) return std::nullopt;
  long double v = c - (c - b) * (c - b) / d2;
  return std::clamp(v, 0.0L, c);
}

template <typename ThetaAt, typename LowerAt>
ThetaBracket limit_impl(ThetaAt theta_at, LowerAt lower_at, long double tol, std::size_t budget) {
  ThetaBracket out;
  std::size_t n = 4;
  for (;;) {
    out.sequence.emplace_back(n, theta_at(n));
    std::size_t m = out.sequence.size();
    out.depth = n;
    out.hi = out.sequence.back().second;
    if (m >= 3) {
      auto x = aitken(out.sequence[m - 3].second, out.sequence[m - 2].second, out.sequence[m - 1].second);
      out.extrapolate = x.value_or(out.hi);
      if (x && out.hi - *x <= tol) break;
    } else {
      out.extrapolate = out.hi;
    }
    if (n >= budget) {
      out.budget_exhausted = true;
      break;
    }
    n = std::min(budget, n * 2);
  }
  auto lo = lower_at(out.depth);
  out.lo = lo.first;
  out.lo_rigorous = lo.second;
  return out;
}

}  // namespace

ThetaBracket theta_limit(const ChildSequence& seq, const PreciseProb& p, long double tol, std::size_t budget) {
  if (!(tol > 0.0L)) throw std::invalid_argument("theta_limit: tol must be positive");
  return limit_impl([&](std::size_t n) { return theta_truncated(seq, p, n); },
                    [&](std::size_t n) {
                      bool rig = seq.subtree_resistance_upper(n, p).has_value();
                      return std::make_pair(theta_lower(seq, p, n), rig);
                    },
                    tol, budget);
}

ThetaBracket theta_limit(const GeneralTree& tree, const PreciseProb& p, long double tol,
                         std::optional<std::size_t> depth_budget) {
  if (const ChildSequence* s = tree.as_spherical())
    return theta_limit(*s, p, tol, depth_budget.value_or(kSphericalDepthBudget));
  if (!(tol > 0.0L)) throw std::invalid_argument("theta_limit: tol must be positive");
  std::size_t budget = depth_budget.value_or(kGeneralDepthBudget);
  if (tree.depth_bound()) budget = std::min(budget, *tree.depth_bound());
  KindLayers all = build_layers(tree, budget);
  return limit_impl([&](std::size_t n) { return theta_truncated(all.prefix(n), p); },
                    [&](std::size_t n) { return std::make_pair(theta_lower(all.prefix(n), p), true); }, tol,
                    budget);
}

McEstimate theta_mc(const TreeTruncation& t, double p, std::uint64_t replicas, std::uint64_t seed,
                    unsigned threads) {
  if (replicas == 0) throw std::invalid_argument("theta_mc: replicas must be >= 1");
  const std::uint64_t blocks = (replicas + kMcBlock - 1) / kMcBlock;
  std::vector<std::uint64_t> hits(blocks, 0);
  const std::uint32_t boundary = t.level_offset[t.depth];
  auto run_block = [&](std::uint64_t b) {
    std::mt19937_64 g(stream_seed(seed, b));
    std::uint64_t reps = std::min(kMcBlock, replicas - b * kMcBlock);
    std::vector<std::uint32_t> stack;
    std::uint64_t h = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
      stack.assign(1, 0);
      while (!stack.empty()) {
        std::uint32_t v = stack.back();
        stack.pop_back();
        if (v >= boundary) {
          ++h;
          break;
        }
        for (std::uint32_t w = t.first_child[v]; w < t.first_child[v + 1]; ++w)
          if (unit_uniform(g) < p) stack.push_back(w);
      }
    }
    hits[b] = h;
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t b = w; b < blocks; b += threads) run_block(b);
      });
    for (auto& th : pool) th.join();
  }
  McEstimate est;
  est.replicas = replicas;
  for (auto h : hits) est.successes += h;
  est.estimate = static_cast<double>(est.successes) / static_cast<double>(replicas);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(replicas));
  return est;
}

PcEstimate branching_pc(const ChildSequence& seq, std::size_t K) {
  if (K < 10) throw std::invalid_argument("branching_pc: K must be >= 10");
  PcEstimate out;
  out.depth = K;
  auto ls = seq.log_level_sizes(K);
  long double gmin = std::numeric_limits<long double>::infinity(), gmax = 0.0L;
  for (std::size_t k = K / 2; k <= K; ++k) {
    if (k == 0) continue;
    long double g = std::exp(ls[k] / static_cast<long double>(k));
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  out.estimate = 1.0L / gmin;
  auto env = seq.envelope();
  if (env && env->has_upper()) {
    out.lo = out.hi = env->rate.value();
    out.estimate = out.lo;
    out.method = "growth-envelope";
    out.rigorous = true;
  } else {
    out.lo = 1.0L / gmax;
    out.hi = std::min(1.0L, 1.0L / gmin);
    out.method = "branching-number";
  }
  out.degenerate = out.estimate <= 0.0L || out.estimate >= 1.0L - 1e-12L;
  return out;
}

PcEstimate branching_pc(const GeneralTree& tree, std::size_t K, std::size_t bisection_depth) {
  if (const ChildSequence* s = tree.as_spherical()) return branching_pc(*s, K);
  if (K < 10) throw std::invalid_argument("branching_pc: K must be >= 10");
  std::size_t D = std::max(K, bisection_depth);
  if (tree.depth_bound()) D = std::min(D, *tree.depth_bound());
  KindLayers layers = build_layers(tree, D);
  PcEstimate out;
  out.method = "bisection";
  out.depth = D;
  long double gmax = 0.0L;
  std::size_t top = std::min(K, D);
  for (std::size_t k = std::max<std::size_t>(1, top / 2); k <= top; ++k) {
    long double tot = 0.0L;
    for (auto c : layers.layers[k].count) tot += c;
    gmax = std::max(gmax, std::exp(std::log(tot) / static_cast<long double>(k)));
  }
  out.lo = std::min(1.0L, 1.0L / gmax);
  KindLayers bis = bisection_depth < D ? layers.prefix(bisection_depth) : layers;
  long double a = 0.0L, b = 1.0L;
  for (int it = 0; it < 64; ++it) {
    long double mid = 0.5L * (a + b);
    if (mid == a || mid == b) break;
    if (theta_lower(bis, PreciseProb(mid)) > 0.0L) {
      b = mid;
    } else {
      a = mid;
    }
  }
  out.hi = b;
  out.lo = std::min(out.lo, out.hi);
  out.estimate = out.hi;
  out.degenerate = out.hi >= 1.0L - 1e-12L || out.hi <= 0.0L;
  return out;
}

std::string to_string(SandwichVerdict v) {
  switch (v) {
    case SandwichVerdict::Holds:
      return "holds";
    case SandwichVerdict::Violated:
      return "violated";
    case SandwichVerdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

void judge(SandwichResult& r) {
  r.lower = r.c_lo / (1.0L + r.c_lo);
  r.upper = std::min(1.0L, 2.0L * r.c_hi / (1.0L + r.c_hi));
  const long double eps = 1e-15L;
  bool low_ok = r.lower <= r.theta_hi + eps;
  bool up_ok = r.theta_lo <= r.upper + eps;
  if (!up_ok || (!low_ok && r.c_rigorous)) {
    r.verdict = SandwichVerdict::Violated;
  } else if (r.c_rigorous) {
    r.verdict = SandwichVerdict::Holds;
  } else {
    r.verdict = SandwichVerdict::Inconclusive;
  }
}

}  // namespace

SandwichResult lyons_sandwich(const ChildSequence& seq, const PreciseProb& p, std::size_t n, Normalization norm) {
  if (!p.in_open_unit()) throw std::invalid_argument("lyons_sandwich: p must lie in (0,1)");
  SandwichResult r;
  r.normalization = norm;
  ConductanceModel m{ConductanceKind::Percolation, norm, p};
  ConductanceBracket b = conductance_bracket_ss(seq, m, n);
  r.c_lo = b.rigorous ? b.lo : 0.0L;
  r.c_hi = b.hi;
  r.c_rigorous = b.rigorous;
  r.theta_hi = theta_truncated(seq, p, n);
  r.theta_lo = theta_lower(seq, p, n);
  judge(r);
  return r;
}

SandwichResult lyons_sandwich(const GeneralTree& tree, const PreciseProb& p, std::size_t n, Normalization norm) {
  if (const ChildSequence* s = tree.as_spherical()) return lyons_sandwich(*s, p, n, norm);
  if (!p.in_open_unit()) throw std::invalid_argument("lyons_sandwich: p must lie in (0,1)");
  KindLayers layers = build_layers(tree, n);
  SandwichResult r;
  r.normalization = norm;
  ConductanceModel m{ConductanceKind::Percolation, norm, p};
  r.c_hi = effective_conductance_layered(layers, m, Boundary::Wired);
  r.c_lo = effective_conductance_layered(layers, m, Boundary::LowerBound);
  r.c_rigorous = r.c_lo > 0.0L || tree.rule().zero_theta_certified(p);
  r.theta_hi = theta_truncated(layers, p);
  r.theta_lo = theta_lower(layers, p);
  judge(r);
  return r;
}

void write_theta_csv_row(std::ostream& os, const std::string& tree_id, const PreciseProb& p, std::size_t n,
                         long double theta_n, const std::optional<long double>& lo,
                         const std::optional<long double>& hi, const std::string& method) {
  os << tree_id << "," << fmt_num(p.value()) << "," << n << "," << fmt_num(theta_n) << "," << fmt_opt(lo) << ","
     << fmt_opt(hi) << "," << method << "\n";
}

}  // namespace percotree

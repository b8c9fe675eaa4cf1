#include "percotree_app/reproduce.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "percotree/constructions.hpp"
#include "percotree/csv.hpp"
#include "percotree/dynamics.hpp"
#include "percotree/rng.hpp"
#include "percotree_app/app.hpp"

namespace percotree::app {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g3(long double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3Lg", v);
  return buf;
}

long double rel_diff(long double a, long double b) {
  long double s = std::max(std::fabs(a), std::fabs(b));
  return s == 0.0L ? 0.0L : std::fabs(a - b) / s;
}

// ---- 1 ----

CriterionResult exact_theta(CriterionResult r) {
  constexpr long double kTol = 1e-9L;
  constexpr double kMaxMsPerPoint = 1.0;
  const auto bin = ChildSequence::constant(2);
  bool ok = true;
  std::ostringstream d;
  for (long double p : {0.6L, 0.75L, 0.9L}) {
    long double oracle = (2.0L * p - 1.0L) / (p * p);
    long double v = theta_truncated(bin, p, 60);
    constexpr int reps = 200;
    auto t0 = Clock::now();
    long double sink = 0.0L;
    for (int i = 0; i < reps; ++i) sink += theta_truncated(bin, p + 1e-30L * static_cast<long double>(i), 60);
    double ms = since(t0) * 1e3 / reps;
    long double err = std::fabs(v - oracle);
    auto lim = theta_limit(bin, p, 1e-15L);
    bool pass = err <= kTol && ms < kMaxMsPerPoint;
    ok = ok && pass;
    d << "p=" << static_cast<double>(p) << " err=" << g3(err) << (pass ? "" : "(>1e-9)") << " " << g3(ms) << "ms; ";
    r.data["points"].push_back({{"p", static_cast<double>(p)},
                                {"theta_60", static_cast<double>(v)},
                                {"oracle", static_cast<double>(oracle)},
                                {"abs_error", static_cast<double>(err)},
                                {"ms_per_point", ms},
                                {"limit_lo", static_cast<double>(lim.lo)},
                                {"limit_hi", static_cast<double>(lim.hi)},
                                {"limit_depth", lim.depth}});
    volatile long double keep = sink;
    (void)keep;
  }
  if (!ok) d << "depth-60 truncation differs from the limit by about (2p(1-p theta))^60";
  r.pass = ok;
  r.detail = d.str();
  return r;
}

// ---- 2 ----

long double closed_form_oracle(const ChildSequence& seq, long double p, std::size_t n, bool dyn) {
  long double s = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    long double g = level_size(seq, k).convert_to<long double>();
    s += std::pow(p, -static_cast<long double>(k)) / ((dyn ? static_cast<long double>(k) : 1.0L) * g);
  }
  return 1.0L / s;
}

CriterionResult conductance_routes(CriterionResult r) {
  constexpr long double kTol = 1e-12L;
  constexpr double kMaxSeconds = 1.0;
  struct Case {
    const char* name;
    ChildSequence seq;
    std::size_t depth;
  };
  std::vector<Case> cases{{"constant(2)", ChildSequence::constant(2), 16},
                          {"constant(3)", ChildSequence::constant(3), 10},
                          {"periodic(1,2,3)", ChildSequence::periodic({1, 2, 3}), 18},
                          {"explicit(3,1,1,2;1)", ChildSequence::prefix_then_constant({3, 1, 1, 2}, 1), 30},
                          {"growth(k2^k)", named_growth_tree("n-two-n"), 12}};
  auto t0 = Clock::now();
  long double worst = 0.0L, worst_oracle = 0.0L;
  std::size_t checks = 0;
  for (const auto& c : cases) {
    for (std::size_t n : {c.depth / 2, c.depth}) {
      auto trunc = std::make_shared<const TreeTruncation>(truncate(c.seq, n));
      for (long double p : {0.3L, 0.5L, 0.7L, 0.9L}) {
        for (auto kind : {ConductanceKind::Percolation, ConductanceKind::Dynamical}) {
          ConductanceModel m{kind, Normalization::PaperLiteral, PreciseProb(p)};
          long double cf = effective_conductance_ss(c.seq, m, n);
          long double red = effective_conductance_reduce(WeightedNetwork(trunc, m));
          long double orc = closed_form_oracle(c.seq, p, n, kind == ConductanceKind::Dynamical);
          worst = std::max(worst, rel_diff(cf, red));
          worst_oracle = std::max(worst_oracle, rel_diff(cf, orc));
          ++checks;
        }
      }
    }
  }
  double secs = since(t0);
  r.pass = worst <= kTol && worst_oracle <= kTol && secs < kMaxSeconds;
  r.detail = std::to_string(checks) + " checks, closed-form vs reduction " + g3(worst) + ", vs direct sum " +
             g3(worst_oracle) + ", " + g3(secs) + "s";
  r.data = {{"checks", checks}, {"max_rel_diff", static_cast<double>(worst)},
            {"max_rel_diff_oracle", static_cast<double>(worst_oracle)}, {"seconds", secs}};
  return r;
}

// ---- 3 ----

CriterionResult thomson(CriterionResult r) {
  constexpr long double kTol = 1e-10L;
  constexpr long double kFlowTol = 1e-12L;
  constexpr long double kBeatTol = 1e-13L;
  constexpr int kNetworks = 20, kPerturb = 100;
  long double worst = 0.0L;
  std::size_t beaten = 0, bad_flows = 0, max_edges = 0;
  for (int i = 0; i < kNetworks; ++i) {
    const std::uint64_t s = stream_seed(20240601, static_cast<std::uint64_t>(i));
    std::mt19937_64 g(s);
    const std::size_t depth = 4 + g() % 5;
    auto rule = [s](std::span<const std::uint64_t> path) {
      std::uint64_t h = s;
      for (auto x : path) h = splitmix64(h ^ (x + 0x51ED27ULL));
      return 1 + splitmix64(h + path.size()) % 3;
    };
    GeneralTree tree = GeneralTree::from_path_rule(rule, "random-" + std::to_string(i), depth);
    auto trunc = std::make_shared<const TreeTruncation>(truncate(tree, depth));
    const std::size_t E = trunc->edge_count();
    max_edges = std::max(max_edges, E);
    std::vector<long double> c(E);
    for (auto& x : c) x = std::pow(10.0L, -2.0L + 4.0L * static_cast<long double>(unit_uniform(g)));
    auto net = WeightedNetwork::custom(trunc, c);
    long double C = effective_conductance_reduce(net);
    UnitFlow f = min_energy_unit_flow(net);
    auto energy = [&](const std::vector<long double>& fl) {
      long double w = 0.0L;
      for (std::size_t e = 0; e < E; ++e) w += fl[e] * fl[e] / c[e];
      return w;
    };
    long double W = energy(f.flow);
    worst = std::max(worst, std::fabs(W * C - 1.0L));
    if (unit_flow_violation(f) > kFlowTol) ++bad_flows;

    // move flow between sibling subtrees, rescaling each subtree's flow
    const auto& t = *trunc;
    std::vector<std::uint32_t> branching;
    for (std::uint32_t v = 0; v < t.level_offset[t.depth]; ++v)
      if (t.first_child[v + 1] - t.first_child[v] >= 2) branching.push_back(v);
    for (int k = 0; k < kPerturb && !branching.empty(); ++k) {
      std::uint32_t v = branching[g() % branching.size()];
      std::uint32_t nc = t.first_child[v + 1] - t.first_child[v];
      std::uint32_t a = t.first_child[v] + static_cast<std::uint32_t>(g() % nc);
      std::uint32_t b = t.first_child[v] + static_cast<std::uint32_t>(g() % (nc - 1));
      if (b >= a) ++b;
      long double Fa = f.flow[a - 1], Fb = f.flow[b - 1];
      if (!(Fa > 0.0L) || !(Fb > 0.0L)) continue;
      long double delta = Fa * static_cast<long double>(unit_uniform(g));
      UnitFlow pf = f;
      std::vector<std::pair<std::uint32_t, long double>> stack{{a, (Fa - delta) / Fa}, {b, (Fb + delta) / Fb}};
      while (!stack.empty()) {
        auto [root, scale] = stack.back();
        stack.pop_back();
        std::vector<std::uint32_t> q{root};
        while (!q.empty()) {
          std::uint32_t u = q.back();
          q.pop_back();
          pf.flow[u - 1] *= scale;
          for (std::uint32_t w = t.first_child[u]; w < t.first_child[u + 1]; ++w) q.push_back(w);
        }
      }
      if (unit_flow_violation(pf) > kFlowTol) ++bad_flows;
      if (energy(pf.flow) < W * (1.0L - kBeatTol)) ++beaten;
    }
  }
  r.pass = worst <= kTol && beaten == 0 && bad_flows == 0 && max_edges <= 10000;
  r.detail = std::to_string(kNetworks) + " networks (<= " + std::to_string(max_edges) + " edges), max |W C - 1| = " +
             g3(worst) + ", perturbed flows beating F*: " + std::to_string(beaten) +
             ", non-conserving flows: " + std::to_string(bad_flows);
  r.data = {{"max_residual", static_cast<double>(worst)}, {"beaten", beaten}, {"bad_flows", bad_flows},
            {"max_edges", max_edges}};
  return r;
}

// ---- 4 ----

CriterionResult sandwich(CriterionResult r) {
  const std::size_t n = std::size_t{1} << 14;
  auto bin = ChildSequence::constant(2);
  auto lem = lemma23_tree(PreciseProb(0.5L), 0.5L).base;
  bool ok = true;
  std::size_t holds = 0, total = 0;
  for (const auto& [name, seq] : {std::pair{"binary", bin}, std::pair{"lemma23(1/2)", lem}}) {
    for (long double p : {0.51L, 0.6L, 0.75L, 0.9L, 0.99L}) {
      auto s = lyons_sandwich(seq, PreciseProb(p), n);
      bool h = s.verdict == SandwichVerdict::Holds;
      if (std::string(name) == "binary") {
        long double th = (2.0L * p - 1.0L) / (p * p);
        h = h && s.lower <= th && th <= s.upper;
      }
      ++total;
      holds += h;
      ok = ok && h;
      r.data["cases"].push_back({{"tree", name}, {"p", static_cast<double>(p)}, {"lower", static_cast<double>(s.lower)},
                                 {"upper", static_cast<double>(s.upper)}, {"theta_lo", static_cast<double>(s.theta_lo)},
                                 {"theta_hi", static_cast<double>(s.theta_hi)}, {"verdict", to_string(s.verdict)}});
    }
  }
  auto lit = lyons_sandwich(bin, PreciseProb(0.6L), n, Normalization::PaperLiteral);
  const long double th = 5.0L / 9.0L;
  bool regression = lit.verdict == SandwichVerdict::Violated && lit.upper < th;
  r.pass = ok && regression;
  r.detail = "lyons-corrected holds " + std::to_string(holds) + "/" + std::to_string(total) +
             "; paper-literal at (binary, 0.6): upper " + g3(lit.upper) + " vs theta " + g3(th) + " -> " +
             to_string(lit.verdict);
  return r;
}

// ---- 5 ----

// sum 1/(k^(1+alpha) L(k)^beta) converges iff alpha >= 1 or beta > 1
bool bertrand_converges(int alpha, int beta) { return alpha >= 1 || beta > 1; }

CriterionResult equivalence(CriterionResult r) {
  constexpr double kMaxSeconds = 30.0;
  struct Case {
    const char* name;
    int alpha, beta;
  };
  auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : {Case{"2^k", 0, 0}, Case{"2^k log k", 0, 1}, Case{"k 2^k", 1, 0}, Case{"k^2 2^k", 2, 0},
                        Case{"k (log k)^2 2^k", 1, 2}}) {
    auto seq = ss_tree_with_growth(GrowthTarget::power(2, c.alpha, c.beta));
    auto v = exceptional_times_verdict(GeneralTree::spherical(seq), PreciseProb(0.5L), {});
    bool conv = bertrand_converges(c.alpha, c.beta);
    auto want = conv ? ExceptionalVerdict::ExceptionalTimesExist : ExceptionalVerdict::NoExceptionalTimes;
    std::vector<Verdict> sub;
    for (const auto* x : {&v.series, &v.integral, &v.cstar})
      if (*x && (*x)->verdict != Verdict::Inconclusive) sub.push_back((*x)->verdict);
    bool agree = std::all_of(sub.begin(), sub.end(), [&](Verdict x) { return x == sub.front(); });
    bool pass = !v.contradiction && agree && v.verdict == want;
    ok = ok && pass;
    d << c.name << ": " << to_string(v.series->verdict)[0] << to_string(v.integral->verdict)[0]
      << to_string(v.cstar->verdict)[0] << " -> " << to_string(v.verdict) << (pass ? "" : " (FAIL)") << "; ";
    r.data["trees"].push_back({{"tree", c.name}, {"oracle", conv ? "convergent" : "divergent"},
                               {"verdict", v.to_json()}});
  }
  double secs = since(t0);
  r.pass = ok && secs < kMaxSeconds;
  d << g3(secs) << "s (series/integral/C*: d=divergent c=convergent i=inconclusive)";
  r.detail = d.str();
  return r;
}

// ---- 6 ----

CriterionResult fubini(CriterionResult r) {
  constexpr long double kTol = 1e-12L;
  long double worst = 0.0L, worst_oracle = 0.0L;
  for (long double pc : {0.3L, 0.5L, 0.7L}) {
    for (std::size_t k = 1; k <= 50; ++k) {
      auto f = fubini_identity_check(k, PreciseProb(pc));
      long double oracle = k == 1 ? std::log(1.0L / pc)
                                  : (std::pow(pc, -static_cast<long double>(k - 1)) - 1.0L) / static_cast<long double>(k - 1);
      worst = std::max(worst, f.residual);
      worst_oracle = std::max(worst_oracle, std::fabs(f.numeric - oracle) / std::max(1.0L, std::fabs(oracle)));
    }
  }
  r.pass = worst <= kTol && worst_oracle <= kTol;
  r.detail = "150 cases, max residual " + g3(worst) + ", vs independent closed form " + g3(worst_oracle);
  r.data = {{"max_residual", static_cast<double>(worst)}, {"max_oracle_residual", static_cast<double>(worst_oracle)}};
  return r;
}

// ---- 7 ----

CriterionResult counterexample(CriterionResult r) {
  PiRule rule;
  GeneralTree tree = theorem12_counterexample(rule);
  bool ok = std::fabs(rule.p(1).value() - 5.0L / 6.0L) < 1e-18L;
  std::ostringstream d;
  for (std::size_t i = 1; i <= 4; ++i) {
    long double lo = theta_lower(tree, rule.p(i), 64);
    long double need = std::ldexp(1.0L, -static_cast<int>(i + 1));
    ok = ok && lo >= need;
    d << "theta(p_" << i << ")>=" << g3(lo) << (lo >= need ? "" : "(<2^-(i+1))") << " ";
    r.data["theta_lower"].push_back({{"i", i}, {"lo", static_cast<double>(lo)}, {"need", static_cast<double>(need)}});
  }
  auto v = exceptional_times_verdict(tree, PreciseProb(0.5L), {});
  bool integral_conv = v.integral && v.integral->verdict == Verdict::Convergent;
  bool cstar_zero = v.cstar && v.cstar->verdict == Verdict::Divergent;
  bool monotone = true;
  if (v.cstar)
    for (std::size_t i = 1; i < v.cstar->evidence.size(); ++i)
      monotone = monotone && v.cstar->evidence[i].second <= v.cstar->evidence[i - 1].second;
  bool verdict = v.verdict == ExceptionalVerdict::NoExceptionalTimes && !v.contradiction &&
                 v.justification.find("C*") != std::string::npos;
  r.pass = ok && integral_conv && cstar_zero && monotone && verdict;
  d << "| integral " << (v.integral ? to_string(v.integral->verdict) : "-") << " (slope "
    << (v.integral && v.integral->exponent ? g3(*v.integral->exponent) : "-") << "), C* "
    << (v.cstar ? to_string(v.cstar->verdict) + " via " + v.cstar->method : "-") << " -> " << to_string(v.verdict);
  r.detail = d.str();
  r.data["verdict"] = v.to_json();
  return r;
}

// ---- 8 ----

CriterionResult energy_chain(CriterionResult r) {
  const long double pc = 0.5L;
  auto seq = named_growth_tree("n2-two-n");
  auto rep = energy_bound_chain(GeneralTree::spherical(seq), PreciseProb(pc), 40);
  // for spherical trees 1/C_n(p) = sum_k p^-k/|G_k|, so the integral is a finite sum
  long double worst = 0.0L, acc = 0.0L;
  for (std::size_t n = 1; n <= 40; ++n) {
    long double g = level_size(seq, n).convert_to<long double>();
    long double I = n == 1 ? std::log(1.0L / pc) : (std::pow(pc, -static_cast<long double>(n - 1)) - 1.0L) / (n - 1);
    acc += I / g;
    worst = std::max(worst, rel_diff(acc, rep.rows[n - 1].lhs));
  }
  bool strict = rep.min_slack > 0.0L;
  r.pass = rep.all_hold && strict && worst <= 1e-10L;
  r.detail = "K=40 all rows hold: " + std::string(rep.all_hold ? "yes" : "no") + ", min slack " + g3(rep.min_slack) +
             ", bound " + g3(rep.bound_K) + " + tail " + g3(rep.tail) + ", lhs vs direct sum " + g3(worst);
  r.data = rep.to_json();
  return r;
}

// ---- 9 ----

CriterionResult remark24(CriterionResult r) {
  auto rep = remark24_pair();
  bool grid = rep.grid.size() == 20;
  for (auto off : rep.grid) grid = grid && off > 0.0L && off < rep.p_star.offset;
  r.pass = rep.ok() && grid;
  std::ostringstream d;
  d << "(i) " << (rep.pc_ok ? "ok" : "FAIL") << " (ii) " << (rep.decay_ok ? "ok" : "FAIL") << " (iii) "
    << (rep.verdicts_ok ? "ok" : "FAIL") << " (iv) " << (rep.grid_ok && grid ? "ok" : "FAIL") << "; "
    << rep.rule.describe() << ", p* = 1/2+" << g3(rep.p_star.offset) << " after " << rep.attempts << " attempts";
  r.detail = d.str();
  r.data = rep.to_json();
  return r;
}

// ---- 10 ----

CriterionResult stationarity(CriterionResult r, unsigned threads) {
  constexpr double kMaxSeconds = 60.0;
  constexpr std::size_t kSeeds = 50;
  const double p = 0.7, T = 1e4;
  auto t0 = Clock::now();
  auto trunc = truncate(ChildSequence::constant(2), 5);
  // recursion oracle for the depth-5 binary tree
  double g = 1.0;
  for (int k = 0; k < 5; ++k) g = 1.0 - (1.0 - p * g) * (1.0 - p * g);
  auto reps = simulate_replicas(trunc, p, T, 7001, kSeeds, threads);
  double m = 0.0, s2 = 0.0;
  for (const auto& x : reps) m += x.occupation;
  m /= kSeeds;
  for (const auto& x : reps) s2 += (x.occupation - m) * (x.occupation - m);
  double sd = std::sqrt(s2 / (kSeeds - 1));
  bool occ = std::fabs(m - g) <= 3.0 * sd;
  auto em = edge_marginal_check(trunc, p, T, 7002);
  auto sim = simulate(trunc, p, T, 7003, SimulateOptions{100, false});
  bool probes = sim.probes_checked == 100 && sim.probe_mismatches == 0;
  double secs = since(t0);
  r.pass = occ && em.passes && probes && secs < kMaxSeconds;
  r.detail = "mean occupation " + g3(m) + " vs theta_5 " + g3(g) + " (sd " + g3(sd) + ", " +
             g3(std::fabs(m - g) / sd) + " sd), edge marginals " + g3(100 * em.pass_rate) + "%, probes " +
             std::to_string(sim.probes_checked - sim.probe_mismatches) + "/100 exact, " + g3(secs) + "s";
  r.data = {{"mean", m},
            {"sd", sd},
            {"stderr", sd / std::sqrt(double(kSeeds))},
            {"theta_5", g},
            {"edge_marginals", em.to_json()},
            {"probes", sim.probes_checked},
            {"probe_mismatches", sim.probe_mismatches},
            {"seconds", secs}};
  return r;
}

// ---- 11 ----

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

CriterionResult determinism(CriterionResult r) {
  bool ok = true;
  std::ostringstream d;
  auto trunc = truncate(ChildSequence::constant(2), 6);
  auto a = simulate(trunc, 0.6, 500.0, 99, SimulateOptions{0, true});
  auto b = simulate(trunc, 0.6, 500.0, 99, SimulateOptions{0, true});
  bool sim_same = a.timeline.events == b.timeline.events && a.timeline.initial == b.timeline.initial &&
                  a.edge_on_time == b.edge_on_time;
  auto r1 = simulate_replicas(trunc, 0.6, 200.0, 5, 8, 1);
  auto r4 = simulate_replicas(trunc, 0.6, 200.0, 5, 8, 4);
  bool rep_same = true;
  for (std::size_t i = 0; i < r1.size(); ++i)
    rep_same = rep_same && r1[i].occupation == r4[i].occupation && r1[i].switches == r4[i].switches;
  auto m1 = theta_mc(trunc, 0.6, 20000, 11, 1);
  auto m4 = theta_mc(trunc, 0.6, 20000, 11, 4);
  bool mc_same = m1.successes == m4.successes && m1.estimate == m4.estimate;
  ok = sim_same && rep_same && mc_same;
  d << "timeline " << (sim_same ? "bit-exact" : "DIFFERS") << ", replicas 1 vs 4 threads "
    << (rep_same ? "identical" : "DIFFER") << ", MC 1 vs 4 threads " << (mc_same ? "identical" : "DIFFER");

  fs::path root = fs::temp_directory_path() / ("percotree-determinism-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  const std::string tree = (root / "binary.json").string();
  bool cli_ok = run_cli({"construct", "--name", "binary", "--out", tree}, sink, sink) == 0;
  std::vector<std::vector<std::string>> cmds{
      {"theta", "--tree", tree, "--p-grid", "0.5:1:0.05", "--depth", "60", "--replicas", "2000", "--mc-depth", "8"},
      {"conductance", "--tree", tree, "--p", "0.6", "--depth", "20"},
      {"flow", "--tree", tree, "--p", "0.6", "--depth", "8"},
      {"criteria", "--tree", tree, "--pc", "0.5", "--K", "200", "--no-integral"},
      {"simulate", "--tree", tree, "--p", "0.7", "--T", "200", "--depth", "4", "--replicas", "4", "--trace"}};
  std::size_t files = 0, mismatched = 0;
  for (int run = 0; run < 2; ++run) {
    for (auto cmd : cmds) {
      cmd.insert(cmd.end(), {"--seed", "3", "--threads", run == 0 ? "1" : "3", "--out", (root / std::to_string(run)).string()});
      cli_ok = cli_ok && run_cli(cmd, sink, sink) == 0;
    }
  }
  for (const auto& e : fs::directory_iterator(root / "0")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    fs::path other = root / "1" / e.path().filename();
    if (!fs::exists(other) || csv_body(slurp(e.path())) != csv_body(slurp(other))) ++mismatched;
  }
  fs::remove_all(root);
  bool csv_ok = cli_ok && files >= 5 && mismatched == 0;
  d << ", CLI reruns: " << files << " CSV files, " << mismatched << " body mismatches" << (cli_ok ? "" : " (command failed)");
  r.pass = ok && csv_ok;
  r.detail = d.str();
  r.data = {{"csv_files", files}, {"mismatched", mismatched}};
  return r;
}

}  // namespace

std::string CriterionResult::line() const {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] %2d %-22s", pass ? "PASS" : "FAIL", id, name.c_str());
  char tail[32];
  std::snprintf(tail, sizeof tail, " (%.2fs)", seconds);
  return std::string(head) + " " + detail + tail;
}

std::string criterion_name(int id) {
  static const char* names[] = {"",
                                "exact-theta-oracle",
                                "conductance-routes",
                                "thomson-principle",
                                "lyons-sandwich",
                                "ss-equivalence",
                                "fubini-identity",
                                "one-way-implication",
                                "energy-bound-chain",
                                "remark-pair",
                                "dynamics-stationarity",
                                "determinism"};
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id");
  return names[id];
}

CriterionResult run_criterion(int id, unsigned threads) {
  CriterionResult r;
  r.id = id;
  r.name = criterion_name(id);
  auto t0 = Clock::now();
  try {
    switch (id) {
      case 1: r = exact_theta(r); break;
      case 2: r = conductance_routes(r); break;
      case 3: r = thomson(r); break;
      case 4: r = sandwich(r); break;
      case 5: r = equivalence(r); break;
      case 6: r = fubini(r); break;
      case 7: r = counterexample(r); break;
      case 8: r = energy_chain(r); break;
      case 9: r = remark24(r); break;
      case 10: r = stationarity(r, threads); break;
      case 11: r = determinism(r); break;
    }
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = since(t0);
  return r;
}

}  // namespace percotree::app

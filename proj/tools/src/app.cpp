#include "percotree_app/app.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "percotree/criteria.hpp"
#include "percotree/csv.hpp"
#include "percotree/dynamics.hpp"
#include "percotree/tree_spec.hpp"
#include "percotree_app/reproduce.hpp"

namespace percotree::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Inconclusive {};

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = ".";
  bool strict = false;
  std::string config;
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

fs::path out_file(const Globals& g, const std::string& name) {
  fs::path dir(g.out);
  fs::create_directories(dir);
  return dir / name;
}

CsvMeta meta_for(const std::string& command, const json& cfg, const std::string& tree) {
  CsvMeta m;
  m.add("tool", "percotree 0.1.0");
  m.add("command", command);
  m.add("config_hash", hash_hex(cfg.dump()));
  if (!tree.empty()) m.add("tree_id", tree);
  m.add("timestamp", utc_now());
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

struct LoadedTree {
  json spec;
  GeneralTree tree;
  std::string id;
};

LoadedTree load(const std::string& path) {
  json spec = read_json_file(path);
  return {spec, tree_from_json(spec), tree_id(spec)};
}

PreciseProb checked_p(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw SpecError(what, "expected a value in (0,1)");
  return PreciseProb(static_cast<long double>(p));
}

json param_value(const std::string& v) {
  try {
    return json::parse(v);
  } catch (const json::exception&) {
    return v;
  }
}

// Appends config values for options not already on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args, const json& cfg) {
  if (!cfg.is_object()) throw SpecError("config", "expected a JSON object");
  auto present = [&](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::string sub;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--seed" || a == "--threads" || a == "--out" || a == "--config") {
      ++i;
      continue;
    }
    if (!a.empty() && a[0] != '-') {
      sub = a;
      break;
    }
  }
  auto add = [&](const std::string& key, const json& v) {
    if (present(key)) return;
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back("--" + key);
      return;
    }
    args.push_back("--" + key);
    if (v.is_array()) {
      for (const auto& e : v) args.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
  };
  for (const auto& [k, v] : cfg.items()) {
    if (v.is_object()) continue;
    if (k == "config") throw SpecError("config.config", "nested config files are not supported");
    add(k, v);
  }
  if (!sub.empty() && cfg.contains(sub)) {
    if (!cfg.at(sub).is_object()) throw SpecError("config." + sub, "expected an object");
    for (const auto& [k, v] : cfg.at(sub).items()) add(k, v);
  }
  return args;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw SpecError("p-grid", "cannot parse '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
    if (parts.size() != 3) throw SpecError("p-grid", "expected a:b:step");
    double a = num(parts[0]), b = num(parts[1]), h = num(parts[2]);
    if (!(h > 0.0) || b < a) throw SpecError("p-grid", "expected a <= b and step > 0");
    auto n = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(a + h * static_cast<double>(i));
  } else {
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ',');) out.push_back(num(s));
  }
  if (out.empty()) throw SpecError("p-grid", "empty grid");
  return out;
}

namespace {

// ---- subcommands ----

int cmd_construct(const Globals& g, const std::string& name, const std::vector<std::string>& params,
                  std::ostream& out) {
  json p = json::object();
  for (const auto& kv : params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw SpecError("param", "expected key=value, got '" + kv + "'");
    p[kv.substr(0, eq)] = param_value(kv.substr(eq + 1));
  }
  json spec = construction_spec(name, p);
  fs::path path = g.out.size() > 5 && g.out.substr(g.out.size() - 5) == ".json" ? fs::path(g.out)
                                                                                 : out_file(g, name + ".json");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, spec.dump(2) + "\n");
  json summary{{"file", path.string()}, {"tree_id", tree_id(spec)}, {"spec", spec}};
  if (name == "lemma23") {
    long double pp = p.value("p", 0.7), q = p.value("q", 0.5);
    summary["report"] = lemma23_tree(PreciseProb(pp), q).to_json();
  }
  out << summary.dump(2) << "\n";
  return kExitOk;
}

struct ThetaArgs {
  std::string tree, grid;
  std::size_t depth = 60;
  bool no_bracket = false;
  double tol = 1e-9;
  std::uint64_t mc = 0;
  std::size_t mc_depth = 10;
};

int cmd_theta(const Globals& g, const ThetaArgs& a, std::ostream& out) {
  auto t = load(a.tree);
  auto grid = parse_grid(a.grid);
  for (double p : grid)
    if (!(p >= 0.0 && p <= 1.0)) throw SpecError("p-grid", "values must lie in [0,1]");
  json cfg{{"command", "theta"}, {"tree", t.spec}, {"grid", grid}, {"depth", a.depth},
           {"bracket", !a.no_bracket}, {"tol", a.tol}, {"replicas", a.mc}, {"mc_depth", a.mc_depth}, {"seed", g.seed}};
  std::ostringstream os;
  std::vector<std::string> cols{"tree_id", "p", "n", "theta_n", "lo", "hi", "method"};
  if (a.mc) {
    cols.insert(cols.end(), {"mc_depth", "mc_estimate", "mc_stderr"});
  }
  write_csv_header(os, meta_for("theta", cfg, t.id), cols);
  std::optional<TreeTruncation> trunc;
  if (a.mc) trunc = truncate(t.tree, a.mc_depth);
  for (double pd : grid) {
    PreciseProb p(static_cast<long double>(pd));
    long double th = theta_truncated(t.tree, p, a.depth);
    std::optional<long double> lo, hi;
    std::string method = "truncated";
    if (!a.no_bracket && pd > 0.0 && pd < 1.0) {
      auto b = theta_limit(t.tree, p, static_cast<long double>(a.tol));
      lo = b.lo;
      hi = b.hi;
      method = "bracket";
    } else if (!a.no_bracket) {
      lo = hi = static_cast<long double>(pd);
      method = "exact";
    }
    std::ostringstream row;
    write_theta_csv_row(row, t.id, p, a.depth, th, lo, hi, method);
    std::string line = row.str();
    if (a.mc) {
      line.pop_back();
      auto mc = theta_mc(*trunc, pd, a.mc, g.seed, g.threads);
      line += "," + std::to_string(a.mc_depth) + "," + fmt_num(mc.estimate) + "," + fmt_num(mc.std_error) + "\n";
    }
    os << line;
  }
  auto path = out_file(g, "theta.csv");
  write_text(path, os.str());
  out << "wrote " << path.string() << " (" << grid.size() << " rows)\n";
  return kExitOk;
}

struct NetArgs {
  std::string tree;
  double p = 0.5;
  std::size_t depth = 30;
  std::string kind = "percolation";
  std::string normalization = "paper-literal";
};

ConductanceModel model_of(const NetArgs& a) {
  ConductanceModel m{parse_kind(a.kind), parse_normalization(a.normalization), checked_p(a.p, "p")};
  if (m.kind == ConductanceKind::Custom) throw SpecError("kind", "custom conductances need an explicit network");
  return m;
}

int cmd_conductance(const Globals& g, const NetArgs& a, std::ostream& out) {
  auto t = load(a.tree);
  ConductanceModel m = model_of(a);
  if (a.depth < 1) throw SpecError("depth", "expected >= 1");
  json cfg{{"command", "conductance"}, {"tree", t.spec}, {"p", a.p}, {"depth", a.depth},
           {"kind", a.kind}, {"normalization", a.normalization}};
  std::ostringstream os;
  write_csv_header(os, meta_for("conductance", cfg, t.id),
                   {"tree_id", "kind", "normalization", "p", "n", "C_n", "tail_lo", "tail_hi"});
  if (const ChildSequence* s = t.tree.as_spherical()) {
    write_conductance_csv_rows(os, t.id, m, conductance_sequence_ss(*s, m, a.depth));
  } else {
    t.tree.check_depth(a.depth);
    KindLayers all = build_layers(t.tree, a.depth);
    std::vector<ConductanceBracket> rows;
    for (std::size_t n = 1; n <= a.depth; ++n) {
      KindLayers L = n == a.depth ? all : all.prefix(n);
      ConductanceBracket b;
      b.n = n;
      b.value = b.hi = effective_conductance_layered(L, m, Boundary::Wired);
      b.lo = effective_conductance_layered(L, m, Boundary::LowerBound);
      b.rigorous = b.lo > 0.0L;
      rows.push_back(b);
    }
    write_conductance_csv_rows(os, t.id, m, rows);
  }
  auto path = out_file(g, "conductance.csv");
  write_text(path, os.str());
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_flow(const Globals& g, const NetArgs& a, std::ostream& out) {
  auto t = load(a.tree);
  ConductanceModel m = model_of(a);
  json cfg{{"command", "flow"}, {"tree", t.spec}, {"p", a.p}, {"depth", a.depth},
           {"kind", a.kind}, {"normalization", a.normalization}};
  auto trunc = std::make_shared<const TreeTruncation>(truncate(t.tree, a.depth));
  WeightedNetwork net(trunc, m);
  UnitFlow f = min_energy_unit_flow(net);
  long double W = flow_energy(f, net);
  long double C = effective_conductance_reduce(net);
  auto by_level = energy_by_level(f, net);
  std::ostringstream os;
  CsvMeta meta = meta_for("flow", cfg, t.id);
  write_csv_header(os, meta, {"tree_id", "level", "edges", "energy"});
  for (std::size_t k = 1; k < by_level.size(); ++k)
    os << t.id << "," << k << "," << trunc->level_count(k) << "," << fmt_num(by_level[k]) << "\n";
  auto path = out_file(g, "flow.csv");
  write_text(path, os.str());
  json summary{{"file", path.string()},
               {"edges", trunc->edge_count()},
               {"energy", static_cast<double>(W)},
               {"conductance", static_cast<double>(C)},
               {"thomson_residual", static_cast<double>(std::fabs(W * C - 1.0L))},
               {"flow_violation", static_cast<double>(unit_flow_violation(f))}};
  out << summary.dump(2) << "\n";
  return kExitOk;
}

struct CriteriaArgs {
  std::string tree;
  std::string pc = "auto";
  std::size_t K = 10000;
  bool no_integral = false;
};

int cmd_criteria(const Globals& g, const CriteriaArgs& a, std::ostream& out) {
  auto t = load(a.tree);
  PreciseProb pc;
  json pc_info;
  if (a.pc == "auto") {
    auto est = branching_pc(t.tree, t.tree.as_spherical() ? 1000 : 64);
    pc = PreciseProb(est.estimate);
    pc_info = {{"source", "auto"}, {"method", est.method}, {"lo", static_cast<double>(est.lo)},
               {"hi", static_cast<double>(est.hi)}, {"rigorous", est.rigorous}};
  } else {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(a.pc, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.pc.size()) throw SpecError("pc", "expected a number or 'auto'");
    pc = checked_p(v, "pc");
    pc_info = {{"source", "given"}};
  }
  pc_info["value"] = static_cast<double>(pc.value());
  json cfg{{"command", "criteria"}, {"tree", t.spec}, {"pc", a.pc}, {"K", a.K}, {"integral", !a.no_integral}};
  VerdictOptions vo;
  vo.series.K = a.K;
  vo.cstar.K = a.K;
  vo.run_integral = !a.no_integral;
  auto v = exceptional_times_verdict(t.tree, pc, vo);
  json report = v.to_json();
  report["p_c"] = pc_info;
  report["tree_id"] = t.id;
  report["config_hash"] = hash_hex(cfg.dump());
  auto jpath = out_file(g, "criteria.json");
  write_text(jpath, report.dump(2) + "\n");
  if (const ChildSequence* s = t.tree.as_spherical(); s && pc.in_open_unit()) {
    auto S = series_partial_sums(*s, pc, a.K);
    std::ostringstream os;
    write_csv_header(os, meta_for("criteria", cfg, t.id), {"tree_id", "k", "partial_sum"});
    for (std::size_t k = 1; k <= a.K; ++k) os << t.id << "," << k << "," << fmt_num(S[k]) << "\n";
    write_text(out_file(g, "series.csv"), os.str());
  }
  out << "verdict: " << to_string(v.verdict) << "\n"
      << "justification: " << v.justification << "\n"
      << "wrote " << jpath.string() << "\n";
  if (g.strict && v.verdict == ExceptionalVerdict::Inconclusive) throw Inconclusive{};
  return kExitOk;
}

struct SimArgs {
  std::string tree;
  double p = 0.5;
  double T = 1000;
  std::size_t depth = 5;
  std::size_t replicas = 1;
  bool trace = false;
};

int cmd_simulate(const Globals& g, const SimArgs& a, std::ostream& out) {
  auto t = load(a.tree);
  checked_p(a.p, "p");
  if (!(a.T > 0.0) || !std::isfinite(a.T)) throw SpecError("T", "expected a positive horizon");
  if (a.replicas < 1) throw SpecError("replicas", "expected >= 1");
  auto trunc = truncate(t.tree, a.depth);
  json cfg{{"command", "simulate"}, {"tree", t.spec}, {"p", a.p},         {"T", a.T},
           {"depth", a.depth},      {"seed", g.seed}, {"replicas", a.replicas}};
  std::vector<Timeline> tls;
  auto stats = simulate_replicas(trunc, a.p, a.T, g.seed, a.replicas, g.threads, a.trace ? &tls : nullptr);
  std::ostringstream os;
  CsvMeta meta = meta_for("simulate", cfg, t.id);
  write_csv_header(os, meta, {"replica", "seed", "occupation", "switches", "mean_on", "mean_off"});
  auto opt = [](const std::optional<double>& v) { return v ? fmt_num(*v) : std::string(); };
  for (const auto& r : stats)
    os << r.replica << "," << r.seed << "," << fmt_num(r.occupation) << "," << r.switches << "," << opt(r.mean_on)
       << "," << opt(r.mean_off) << "\n";
  auto path = out_file(g, "simulate.csv");
  write_text(path, os.str());
  if (a.trace) {
    for (std::size_t r = 0; r < tls.size(); ++r) {
      std::ostringstream ts;
      write_csv_header(ts, meta, {"time", "connected"});
      ts << "0," << (tls[r].initial ? 1 : 0) << "\n";
      for (const auto& [time, v] : tls[r].events) ts << fmt_num(time) << "," << (v ? 1 : 0) << "\n";
      write_text(out_file(g, "trace_" + std::to_string(r) + ".csv"), ts.str());
    }
  }
  out << "wrote " << path.string() << " (" << stats.size() << " replicas, " << trunc.edge_count() << " edges)\n";
  return kExitOk;
}

int cmd_reproduce(const Globals& g, bool all, const std::vector<int>& ids, bool list, std::ostream& out) {
  if (list) {
    for (int i = 1; i <= kCriterionCount; ++i) out << i << " " << criterion_name(i) << "\n";
    return kExitOk;
  }
  std::vector<int> run = ids;
  if (all || run.empty())
    for (int i = 1; i <= kCriterionCount; ++i) run.push_back(i);
  for (int id : run)
    if (id < 1 || id > kCriterionCount) throw SpecError("criterion", "expected 1.." + std::to_string(kCriterionCount));
  json report = json::array();
  bool ok = true;
  for (int id : run) {
    auto r = run_criterion(id, g.threads);
    out << r.line() << std::endl;
    ok = ok && r.pass;
    report.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}});
  }
  write_text(out_file(g, "reproduce.json"), report.dump(2) + "\n");
  return ok ? kExitOk : kExitError;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamical percolation on trees: exceptional times diagnostics", "percotree"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--strict", g.strict, "exit 2 when a verdict is inconclusive");
  app.add_option("--config", g.config, "JSON config file");

  std::string cname;
  std::vector<std::string> cparams;
  auto* construct = app.add_subcommand("construct", "write a tree specification");
  construct->add_option("--name", cname, "construction name")->required();
  construct->add_option("--param", cparams, "parameter key=value");

  ThetaArgs ta;
  auto* theta = app.add_subcommand("theta", "percolation function table");
  theta->add_option("--tree", ta.tree)->required();
  theta->add_option("--p-grid", ta.grid, "a:b:step or comma list")->required();
  theta->add_option("--depth", ta.depth);
  theta->add_flag("--no-bracket", ta.no_bracket);
  theta->add_option("--tol", ta.tol, "bracket tolerance")->check(CLI::PositiveNumber);
  theta->add_option("--replicas", ta.mc, "Monte Carlo replicas per p");
  theta->add_option("--mc-depth", ta.mc_depth, "truncation depth for Monte Carlo");

  NetArgs ca;
  auto* cond = app.add_subcommand("conductance", "effective conductance table");
  NetArgs fa;
  fa.depth = 10;
  auto* flow = app.add_subcommand("flow", "minimal energy unit flow");
  for (auto [sub, na] : {std::pair{cond, &ca}, std::pair{flow, &fa}}) {
    sub->add_option("--tree", na->tree)->required();
    sub->add_option("--p", na->p)->required();
    sub->add_option("--depth", na->depth);
    sub->add_option("--kind", na->kind, "percolation or dynamical");
    sub->add_option("--normalization", na->normalization, "paper-literal or lyons-corrected");
  }

  CriteriaArgs ra;
  auto* crit = app.add_subcommand("criteria", "exceptional times verdict");
  crit->add_option("--tree", ra.tree)->required();
  crit->add_option("--pc", ra.pc, "critical value or 'auto'");
  crit->add_option("--K", ra.K)->check(CLI::Range(std::size_t{10}, std::size_t{1} << 26));
  crit->add_flag("--no-integral", ra.no_integral);

  SimArgs sa;
  auto* sim = app.add_subcommand("simulate", "dynamical percolation simulation");
  sim->add_option("--tree", sa.tree)->required();
  sim->add_option("--p", sa.p)->required();
  sim->add_option("--T", sa.T)->required();
  sim->add_option("--depth", sa.depth);
  sim->add_option("--replicas", sa.replicas);
  sim->add_flag("--trace", sa.trace, "write event traces");

  bool rall = false, rlist = false;
  std::vector<int> rids;
  auto* rep = app.add_subcommand("reproduce", "acceptance suite");
  rep->add_flag("--all", rall);
  rep->add_option("--criterion", rids);
  rep->add_flag("--list", rlist);

  std::vector<std::string> args = raw;
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (!path.empty()) {
        args = apply_config(args, read_json_file(path));
        break;
      }
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*construct) return cmd_construct(g, cname, cparams, out);
    if (*theta) return cmd_theta(g, ta, out);
    if (*cond) return cmd_conductance(g, ca, out);
    if (*flow) return cmd_flow(g, fa, out);
    if (*crit) return cmd_criteria(g, ra, out);
    if (*sim) return cmd_simulate(g, sa, out);
    if (*rep) return cmd_reproduce(g, rall, rids, rlist, out);
  } catch (const Inconclusive&) {
    err << "inconclusive verdict under --strict\n";
    return kExitInconclusive;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace percotree::app

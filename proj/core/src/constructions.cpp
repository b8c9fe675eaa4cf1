#include "percotree/constructions.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace percotree {

namespace {

nlohmann::json num(long double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  return static_cast<double>(v);
}

nlohmann::json pc_json(const PcEstimate& pc) {
  return {{"estimate", num(pc.estimate)}, {"lo", num(pc.lo)},          {"hi", num(pc.hi)},
          {"method", pc.method},          {"rigorous", pc.rigorous}, {"depth", pc.depth}};
}

nlohmann::json pairs_json(const std::vector<std::pair<std::size_t, long double>>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [n, x] : v) a.push_back({n, num(x)});
  return a;
}

}  // namespace

ChildSequence ss_tree_with_growth(const GrowthTarget& f) {
  if (f.coef < 1) throw std::invalid_argument("growth target: coef must be >= 1");
  if (!(f.rate.value() > 0.0L) || f.rate.value() > 1.0L) throw std::invalid_argument("growth target: rate must lie in (0,1]");
  if (f.alpha < 0 || f.beta < 0) throw std::invalid_argument("growth target: exponents must be >= 0");
  return ChildSequence::growth(f);
}

std::vector<std::string> named_growth_trees() {
  return {"binary", "two-n-log-n", "n-two-n", "n2-two-n", "n-log2-two-n"};
}

ChildSequence named_growth_tree(const std::string& name) {
  if (name == "binary") return ss_tree_with_growth(GrowthTarget::power(2));
  if (name == "two-n-log-n") return ss_tree_with_growth(GrowthTarget::power(2, 0, 1));
  if (name == "n-two-n") return ss_tree_with_growth(GrowthTarget::power(2, 1));
  if (name == "n2-two-n") return ss_tree_with_growth(GrowthTarget::power(2, 2));
  if (name == "n-log2-two-n") return ss_tree_with_growth(GrowthTarget::power(2, 1, 2));
  throw std::invalid_argument("unknown growth tree '" + name + "'");
}

nlohmann::json Lemma23Result::to_json() const {
  return {{"tree", tree.describe()},
          {"base", base.describe()},
          {"j", j},
          {"theta_prime", {{"lo", num(theta_prime.lo)}, {"hi", num(theta_prime.hi)}, {"depth", theta_prime.depth}}},
          {"theta_glued_lo", num(theta_glued_lo)},
          {"pc", pc_json(pc)},
          {"ok", ok},
          {"note", note}};
}

Lemma23Result lemma23_tree(const PreciseProb& p, long double q, std::size_t depth_budget) {
  if (!p.in_open_unit()) throw std::invalid_argument("lemma23: p must lie in (0,1)");
  if (!(q > 0.0L && q < 1.0L)) throw std::invalid_argument("lemma23: q must lie in (0,1)");
  Lemma23Result r;
  r.base = ss_tree_with_growth(GrowthTarget::inverse_prob(p, 2));
  r.theta_prime = theta_limit(r.base, p, 1e-9L, depth_budget);
  const long double t = r.theta_prime.lo;
  if (!(t > 0.0L)) {
    r.tree = GeneralTree::spherical(r.base);
    r.note = "no positive lower bracket for theta'";
    return r;
  }
  if (t < q) r.j = static_cast<std::uint64_t>(std::ceil(std::log1p(-q) / std::log1p(-t) - 1e-12L));
  if (r.j < 1) r.j = 1;
  ChildSequence glued = r.j == 1 ? r.base : r.base.with_root_multiplier(r.j);
  r.tree = GeneralTree::spherical(glued);
  r.theta_glued_lo = -std::expm1(static_cast<long double>(r.j) * std::log1p(-t));
  r.pc = branching_pc(glued, 1000);
  r.ok = r.theta_glued_lo >= q;
  if (!r.ok) r.note = "glued lower bracket below q";
  return r;
}

PreciseProb PiRule::p(std::size_t i) const {
  if (!(B > 2.0L)) throw std::invalid_argument("pi rule: base must exceed 2");
  if (i < 1) throw std::invalid_argument("pi rule: index starts at 1");
  if (i > max_index()) throw std::out_of_range("pi rule: B^-i underflows at i = " + std::to_string(i));
  return PreciseProb(0.5L, std::exp(-static_cast<long double>(i) * std::log(B)));
}

std::size_t PiRule::max_index() const {
  // keep 64 bits of headroom above the smallest normal value
  long double room = -std::log(LDBL_MIN) - 64.0L * std::log(2.0L);
  return static_cast<std::size_t>(room / std::log(B));
}

std::string PiRule::describe() const {
  std::ostringstream os;
  os.precision(21);
  os << "1/2+" << B << "^-i";
  return os.str();
}

GeneralTree theorem12_counterexample(const PiRule& rule, std::size_t depth_budget) {
  if (!(rule.B > 2.0L)) throw std::invalid_argument("pi rule: base must exceed 2");
  auto make = [rule, depth_budget](std::size_t i) {
    Lemma23Result r = lemma23_tree(rule.p(i), 0.5L, depth_budget);
    if (!r.ok) throw std::runtime_error("counterexample component " + std::to_string(i) + ": " + r.note);
    return r.tree;
  };
  // every component has p_c = p_i > 1/2
  auto subcritical = [](const PreciseProb& p) { return PreciseProb::compare(p, 0.5L) <= 0; };
  auto spine = std::make_shared<SpineRule>(make, "spine(" + rule.describe() + ")", subcritical);
  return GeneralTree(spine, rule.max_index());
}

nlohmann::json Remark24Report::to_json() const {
  nlohmann::json j;
  j["gamma"] = gamma.describe();
  j["gamma_prime"] = gamma_prime.describe();
  j["pi_rule"] = rule.describe();
  j["p_star"] = {{"base", num(p_star.base)}, {"offset", num(p_star.offset)}};
  nlohmann::json g = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.size(); ++i)
    g.push_back({{"offset", num(grid[i])}, {"theta_gamma_hi", num(theta_gamma_hi[i])},
                 {"theta_gamma_prime_lo", num(theta_gamma_prime_lo[i])}});
  j["grid"] = g;
  j["grid_ok"] = grid_ok;
  j["attempts"] = attempts;
  j["attempt_log"] = attempt_log;
  j["pc_gamma"] = pc_json(pc_gamma);
  j["pc_gamma_prime"] = pc_json(pc_gamma_prime);
  j["pc_ok"] = pc_ok;
  j["decay_gamma"] = pairs_json(decay_gamma);
  j["decay_gamma_prime"] = pairs_json(decay_gamma_prime);
  j["zero_certified_gamma"] = zero_certified_gamma;
  j["zero_certified_gamma_prime"] = zero_certified_gamma_prime;
  j["decay_ok"] = decay_ok;
  j["verdict_gamma"] = verdict_gamma ? verdict_gamma->to_json() : nlohmann::json();
  j["verdict_gamma_prime"] = verdict_gamma_prime ? verdict_gamma_prime->to_json() : nlohmann::json();
  j["verdicts_ok"] = verdicts_ok;
  j["ok"] = ok();
  return j;
}

namespace {

bool strictly_decreasing(const std::vector<std::pair<std::size_t, long double>>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i].second < v[i - 1].second)) return false;
  return v.size() >= 2;
}

}  // namespace

Remark24Report remark24_pair(const Remark24Options& opts) {
  if (opts.grid_points < 1) throw std::invalid_argument("remark24: grid_points must be >= 1");
  Remark24Report rep;
  rep.gamma = named_growth_tree("n-two-n");
  const PreciseProb half(0.5L);
  const long double steps = static_cast<long double>(opts.grid_points + 1);

  long double B = 3.0L;
  for (std::size_t a = 0; a < opts.retries && !rep.grid_ok; ++a, B = B * B) {
    ++rep.attempts;
    PiRule rule{B};
    GeneralTree tp = theorem12_counterexample(rule);
    KindLayers layers = build_layers(tp, opts.gamma_prime_depth);
    std::ostringstream log;
    log << "B=" << static_cast<double>(B) << ":";
    bool found = false;
    for (int s = 1; s < 64 && !found; ++s) {
      const long double U = std::ldexp(1.0L, -s);
      if (1.0L / B > U / steps) {
        log << " no admissible U";
        break;
      }
      std::vector<long double> grid, hi, lo;
      bool pass = true;
      for (std::size_t j = 1; j <= opts.grid_points && pass; ++j) {
        long double off = U * static_cast<long double>(j) / steps;
        PreciseProb p(0.5L, off);
        long double th = theta_truncated(rep.gamma, p, opts.gamma_depth);
        long double tl = theta_lower(layers, p);
        grid.push_back(off);
        hi.push_back(th);
        lo.push_back(tl);
        pass = th < tl;
      }
      if (pass) {
        found = true;
        log << " U=2^-" << s << " passes";
        rep.rule = rule;
        rep.gamma_prime = tp;
        rep.p_star = PreciseProb(0.5L, U);
        rep.grid = std::move(grid);
        rep.theta_gamma_hi = std::move(hi);
        rep.theta_gamma_prime_lo = std::move(lo);
      }
    }
    if (!found && log.str().find("no admissible") == std::string::npos) log << " no passing U";
    rep.attempt_log.push_back(log.str());
    rep.grid_ok = found;
  }
  if (!rep.grid_ok) return rep;

  rep.pc_gamma = branching_pc(rep.gamma, 1000);
  rep.pc_gamma_prime = branching_pc(rep.gamma_prime, opts.gamma_prime_depth);
  rep.pc_ok = rep.pc_gamma.lo <= 0.5L && rep.pc_gamma.hi >= 0.5L && rep.pc_gamma_prime.lo <= 0.5L &&
              rep.pc_gamma_prime.hi >= 0.5L;

  for (std::size_t n = 1; n <= opts.gamma_depth; n *= 2)
    rep.decay_gamma.emplace_back(n, theta_truncated(rep.gamma, half, n));
  KindLayers layers = build_layers(rep.gamma_prime, opts.gamma_prime_depth);
  for (std::size_t n = 1; n <= opts.gamma_prime_depth; n *= 2)
    rep.decay_gamma_prime.emplace_back(n, theta_truncated(layers.prefix(n), half));
  rep.zero_certified_gamma = GeneralTree::spherical(rep.gamma).rule().zero_theta_certified(half);
  rep.zero_certified_gamma_prime = rep.gamma_prime.rule().zero_theta_certified(half);
  rep.decay_ok = strictly_decreasing(rep.decay_gamma) && strictly_decreasing(rep.decay_gamma_prime) &&
                 rep.zero_certified_gamma && rep.zero_certified_gamma_prime;

  VerdictOptions vo;
  rep.verdict_gamma = exceptional_times_verdict(GeneralTree::spherical(rep.gamma), half, vo);
  vo.cstar.depth = opts.cstar_depth;
  vo.theta_depth = opts.gamma_prime_depth;
  rep.verdict_gamma_prime = exceptional_times_verdict(rep.gamma_prime, half, vo);
  rep.verdicts_ok = rep.verdict_gamma->verdict == ExceptionalVerdict::ExceptionalTimesExist &&
                    rep.verdict_gamma_prime->verdict == ExceptionalVerdict::NoExceptionalTimes;
  return rep;
}

}  // namespace percotree

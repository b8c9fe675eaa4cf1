#include "percotree/criteria.hpp"
#include "percotree/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace percotree {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Divergent:
      return "divergent";
    case Verdict::Convergent:
      return "convergent";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::string to_string(ExceptionalVerdict v) {
  switch (v) {
    case ExceptionalVerdict::NoExceptionalTimes:
      return "no-exceptional-times";
    case ExceptionalVerdict::ExceptionalTimesExist:
      return "exceptional-times-exist";
    case ExceptionalVerdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

nlohmann::json num(long double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  return static_cast<double>(v);
}

// least-squares slope of y against x
long double slope(const std::vector<long double>& x, const std::vector<long double>& y) {
  const auto n = static_cast<long double>(x.size());
  long double mx = std::accumulate(x.begin(), x.end(), 0.0L) / n;
  long double my = std::accumulate(y.begin(), y.end(), 0.0L) / n;
  long double sxy = 0.0L, sxx = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0L ? sxy / sxx : 0.0L;
}

std::vector<std::size_t> doubling_indices(std::size_t K) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k < K; k *= 2) idx.push_back(k);
  idx.push_back(K);
  return idx;
}

// S_{2m} - S_m > delta at geometric m over the last decade [K/10, K/2]
bool doubling_rule(const std::vector<long double>& S, std::size_t K, long double delta) {
  std::size_t lo = std::max<std::size_t>(1, K / 10), hi = K / 2;
  if (hi < lo) return false;
  for (int i = 0; i < 8; ++i) {
    long double t = static_cast<long double>(i) / 7.0L;
    auto m = static_cast<std::size_t>(std::llround(std::exp(std::log((long double)lo) * (1 - t) + std::log((long double)hi) * t)));
    m = std::clamp(m, lo, hi);
    if (!(S[2 * m] - S[m] > delta)) return false;
  }
  return true;
}

}  // namespace

nlohmann::json DivergenceDiagnosis::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  j["rigorous"] = rigorous;
  j["method"] = method;
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& [i, v] : evidence) ev.push_back({num(i), num(v)});
  j["evidence"] = ev;
  j["tail_bound"] = tail_bound ? num(*tail_bound) : nlohmann::json();
  j["exponent"] = exponent ? num(*exponent) : nlohmann::json();
  j["params"] = params;
  if (!note.empty()) j["note"] = note;
  return j;
}

std::vector<long double> series_partial_sums(const ChildSequence& seq, const PreciseProb& pc, std::size_t K) {
  auto ls = seq.log_level_sizes(K);
  const long double lp = pc.log();
  std::vector<long double> S(K + 1, 0.0L);
  KahanSum acc;
  for (std::size_t k = 1; k <= K; ++k) {
    acc.add(std::exp(-static_cast<long double>(k) * lp - ls[k] - std::log(static_cast<long double>(k))));
    S[k] = acc.value();
  }
  return S;
}

DivergenceDiagnosis series_criterion_ss(const ChildSequence& seq, const PreciseProb& pc, const SeriesOptions& opts) {
  if (!pc.in_open_unit()) throw std::invalid_argument("series criterion: p_c must lie in (0,1)");
  if (opts.K < 10) throw std::invalid_argument("series criterion: K must be >= 10");
  const std::size_t K = opts.K;
  auto S = series_partial_sums(seq, pc, K);
  DivergenceDiagnosis d;
  d.params = {{"K", K}, {"delta", num(opts.delta)}, {"p_c", num(pc.value())}, {"tree", seq.describe()}};
  for (auto k : doubling_indices(K)) d.evidence.emplace_back(static_cast<long double>(k), S[k]);
  {
    std::vector<long double> x, y;
    for (std::size_t k = std::max<std::size_t>(1, K / 10); k <= K; k += std::max<std::size_t>(1, K / 100)) {
      x.push_back(std::log(static_cast<long double>(k)));
      y.push_back(S[k]);
    }
    d.exponent = slope(x, y);
  }
  auto env = seq.envelope();
  std::optional<long double> tail;
  if (env) tail = series_tail_upper(*env, pc, K, 1);
  if (tail) {
    d.verdict = Verdict::Convergent;
    d.rigorous = true;
    d.method = "envelope-tail";
    d.tail_bound = tail;
    return d;
  }
  if (env && series_diverges(*env, pc, 1)) {
    d.verdict = Verdict::Divergent;
    d.rigorous = true;
    d.method = "envelope-comparison";
    d.note = "terms bounded below by a divergent p-series or Bertrand series via the upper growth envelope";
    return d;
  }
  if (doubling_rule(S, K, opts.delta)) {
    d.verdict = Verdict::Divergent;
    d.method = "doubling-increment";
    return d;
  }
  d.method = "none";
  return d;
}

ThetaProvider theta_provider(const GeneralTree& tree, std::size_t depth) {
  ThetaProvider tp;
  tp.depth = depth;
  if (const ChildSequence* s = tree.as_spherical()) {
    ChildSequence seq = *s;
    auto c = std::make_shared<std::vector<std::uint64_t>>(seq.children_upto(depth));
    tp.upper = [seq, depth](const PreciseProb& p) { return theta_truncated(seq, p, depth); };
    tp.lower = [seq, depth](const PreciseProb& p) { return theta_lower(seq, p, depth); };
    return tp;
  }
  auto layers = std::make_shared<KindLayers>(build_layers(tree, depth));
  tp.upper = [layers](const PreciseProb& p) { return theta_truncated(*layers, p); };
  tp.lower = [layers](const PreciseProb& p) { return theta_lower(*layers, p); };
  return tp;
}

DivergenceDiagnosis integral_reciprocal_theta(const ThetaProvider& theta, const PreciseProb& pc,
                                              const IntegralOptions& opts) {
  if (!pc.in_open_unit()) throw std::invalid_argument("integral criterion: p_c must lie in (0,1)");
  std::vector<long double> eps = opts.eps;
  const long double span = 1.0L - pc.value();
  if (eps.empty())
    for (int j = 0; j <= 20; ++j) eps.push_back(span * std::ldexp(1.0L, -j));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0L) || eps[i] > span * (1.0L + 1e-15L))
      throw std::invalid_argument("integral criterion: eps values must lie in (0, 1-p_c]");
    if (i && !(eps[i] < eps[i - 1])) throw std::invalid_argument("integral criterion: eps schedule must decrease");
  }
  if (opts.quad_points < 2) throw std::invalid_argument("integral criterion: need at least 2 quadrature points");

  DivergenceDiagnosis d;
  d.params = {{"p_c", num(pc.value())},         {"depth", theta.depth},
              {"quad_points", opts.quad_points}, {"eps_count", eps.size()},
              {"lo_slope_max", num(opts.lo_slope_max)}, {"hi_slope_min", num(opts.hi_slope_min)}};

  const std::size_t J = eps.size() - 1;
  const std::size_t Q = opts.quad_points;
  std::vector<long double> d_lo(J, 0.0L), d_hi(J, 0.0L);
  std::size_t hi_valid = J;
  std::size_t rejected = 0;
  auto node_p = [&](long double e) { return PreciseProb(pc.base, pc.offset + e); };
  for (std::size_t j = 0; j < J; ++j) {
    const long double u0 = std::log(eps[j + 1]), u1 = std::log(eps[j]);
    const long double h = (u1 - u0) / static_cast<long double>(Q);
    long double s_lo = 0.0L, s_hi = 0.0L;
    bool hi_ok = j < hi_valid;
    for (std::size_t q = 0; q <= Q; ++q) {
      long double u = q == Q ? u1 : u0 + h * static_cast<long double>(q);
      long double e = q == 0 ? eps[j + 1] : (q == Q ? eps[j] : std::exp(u));
      long double w = (q == 0 || q == Q) ? 0.5L : 1.0L;
      PreciseProb p = node_p(e);
      long double up = theta.upper(p);
      if (up > 0.0L) {
        s_lo += w * e / up;
      } else {
        ++rejected;
      }
      if (hi_ok) {
        long double lo = theta.lower(p);
        if (lo > 0.0L) {
          s_hi += w * e / lo;
        } else {
          hi_ok = false;
        }
      }
    }
    d_lo[j] = s_lo * h;
    if (hi_ok) {
      d_hi[j] = s_hi * h;
    } else if (hi_valid == J) {
      hi_valid = j;
    }
  }

  std::vector<long double> I_lo(J + 1, 0.0L), I_hi(J + 1, 0.0L);
  for (std::size_t j = 0; j < J; ++j) {
    I_lo[j + 1] = I_lo[j] + d_lo[j];
    I_hi[j + 1] = I_hi[j] + d_hi[j];
  }
  for (std::size_t j = 0; j <= J; ++j) d.evidence.emplace_back(eps[j], I_lo[j]);

  // lower route: theta_n is an upper bound, restricted to resolvable eps
  std::size_t lo_valid = 0;
  const long double min_eps = theta.depth ? opts.resolve / static_cast<long double>(theta.depth) : 0.0L;
  while (lo_valid < J && eps[lo_valid + 1] >= min_eps) ++lo_valid;
  std::optional<long double> alpha_lo, alpha_hi;
  auto fit = [&](const std::vector<long double>& D, std::size_t end, std::size_t count) -> std::optional<long double> {
    if (end < count || count < 2) return std::nullopt;
    std::vector<long double> x, y;
    for (std::size_t j = end - count; j < end; ++j) {
      if (!(D[j] > 0.0L)) return std::nullopt;
      x.push_back(std::log(eps[j]));
      y.push_back(std::log(D[j]));
    }
    return slope(x, y);
  };
  alpha_lo = fit(d_lo, lo_valid, opts.lo_fit);
  alpha_hi = fit(d_hi, hi_valid, opts.hi_fit);

  d.params["lo_route_octaves"] = lo_valid;
  d.params["hi_route_octaves"] = hi_valid;
  d.params["rejected_nodes"] = rejected;
  d.params["alpha_lo"] = alpha_lo ? num(*alpha_lo) : nlohmann::json();
  d.params["alpha_hi"] = alpha_hi ? num(*alpha_hi) : nlohmann::json();
  d.params["I_lo"] = num(I_lo[lo_valid]);
  d.params["I_hi"] = num(I_hi[hi_valid]);
  nlohmann::json hi_ev = nlohmann::json::array();
  for (std::size_t j = 0; j <= hi_valid; ++j) hi_ev.push_back({num(eps[j]), num(I_hi[j])});
  d.params["I_hi_evidence"] = hi_ev;

  bool div = alpha_lo && *alpha_lo <= opts.lo_slope_max;
  bool conv = alpha_hi && *alpha_hi >= opts.hi_slope_min;
  if (div && conv) {
    d.method = "two-sided";
    d.note = "lower route suggests divergence while upper route suggests convergence";
    return d;
  }
  if (div) {
    d.verdict = Verdict::Divergent;
    d.exponent = alpha_lo;
    d.method = "lower-route-slope";
    d.note = "integrand uses truncated theta (an upper bound on theta), so I(eps) is a lower bound";
    return d;
  }
  if (conv) {
    d.verdict = Verdict::Convergent;
    d.exponent = alpha_hi;
    d.method = "upper-route-slope";
    long double r = std::exp2(-*alpha_hi);
    d.tail_bound = d_hi[hi_valid - 1] * r / (1.0L - r);
    d.note = "integrand uses the rigorous lower bracket of theta; tail extrapolated geometrically (heuristic)";
    return d;
  }
  d.method = "none";
  return d;
}

DivergenceDiagnosis integral_reciprocal_theta(const GeneralTree& tree, const PreciseProb& pc,
                                              const IntegralOptions& opts) {
  std::size_t depth = opts.depth.value_or(tree.as_spherical() ? kSphericalDepthBudget : 64);
  auto d = integral_reciprocal_theta(theta_provider(tree, depth), pc, opts);
  d.params["tree"] = tree.describe();
  return d;
}

namespace {

void classify_resistance(DivergenceDiagnosis& d, const std::vector<std::pair<std::size_t, long double>>& seq,
                         long double delta) {
  // resistance increments over the last three doublings
  std::size_t m = seq.size();
  if (m >= 4) {
    bool grow = true;
    for (std::size_t i = m - 3; i < m; ++i) {
      if (!(seq[i].first == 2 * seq[i - 1].first)) grow = false;
      if (!(1.0L / seq[i].second - 1.0L / seq[i - 1].second > delta)) grow = false;
    }
    if (grow) {
      d.verdict = Verdict::Divergent;
      d.method = "doubling-increment";
      return;
    }
  }
  d.method = "none";
}

}  // namespace

DivergenceDiagnosis cstar_zero_test(const ChildSequence& seq, const PreciseProb& pc, const CStarOptions& opts) {
  if (!pc.in_open_unit()) throw std::invalid_argument("C* test: p_c must lie in (0,1)");
  ConductanceModel m{ConductanceKind::Dynamical, Normalization::PaperLiteral, pc};
  auto rows = conductance_sequence_ss(seq, m, opts.K);
  DivergenceDiagnosis d;
  d.params = {{"K", opts.K}, {"p_c", num(pc.value())}, {"route", "closed-form"}, {"tree", seq.describe()}};
  std::vector<std::pair<std::size_t, long double>> dbl;
  for (auto k : doubling_indices(opts.K)) {
    d.evidence.emplace_back(static_cast<long double>(k), rows[k - 1].value);
    dbl.emplace_back(k, rows[k - 1].value);
  }
  const auto& last = rows.back();
  d.params["cstar_lo"] = num(last.lo);
  d.params["cstar_hi"] = num(last.hi);
  if (last.rigorous && last.lo > 0.0L) {
    d.verdict = Verdict::Convergent;
    d.rigorous = true;
    d.method = "envelope-tail";
    d.tail_bound = last.hi - last.lo;
    d.note = "C*(p_c) > 0";
    return d;
  }
  if (last.rigorous) {
    d.verdict = Verdict::Divergent;
    d.rigorous = true;
    d.method = "envelope-comparison";
    d.note = "C*(p_c) = 0";
    return d;
  }
  std::vector<long double> S(opts.K + 1, 0.0L);
  for (std::size_t k = 1; k <= opts.K; ++k) S[k] = 1.0L / rows[k - 1].value;
  if (doubling_rule(S, opts.K, opts.delta)) {
    d.verdict = Verdict::Divergent;
    d.method = "doubling-increment";
    return d;
  }
  d.method = "none";
  return d;
}

DivergenceDiagnosis cstar_zero_test(const GeneralTree& tree, const PreciseProb& pc, const CStarOptions& opts) {
  if (const ChildSequence* s = tree.as_spherical()) return cstar_zero_test(*s, pc, opts);
  if (!pc.in_open_unit()) throw std::invalid_argument("C* test: p_c must lie in (0,1)");
  std::size_t D = opts.depth;
  if (tree.depth_bound()) D = std::min(D, *tree.depth_bound());
  if (D < 1) throw std::invalid_argument("C* test: depth must be >= 1");
  KindLayers all = build_layers(tree, D);
  ConductanceModel m{ConductanceKind::Dynamical, Normalization::PaperLiteral, pc};
  DivergenceDiagnosis d;
  d.params = {{"depth", D}, {"p_c", num(pc.value())}, {"route", "layered-reduction"}, {"tree", tree.describe()}};
  std::vector<std::pair<std::size_t, long double>> dbl;
  for (std::size_t n = 1; n <= D; n *= 2) {
    long double c = effective_conductance_layered(n == D ? all : all.prefix(n), m, Boundary::Wired);
    dbl.emplace_back(n, c);
    d.evidence.emplace_back(static_cast<long double>(n), c);
    if (n * 2 > D && n != D) {
      c = effective_conductance_layered(all, m, Boundary::Wired);
      dbl.emplace_back(D, c);
      d.evidence.emplace_back(static_cast<long double>(D), c);
    }
  }
  long double lo = effective_conductance_layered(all, m, Boundary::LowerBound);
  d.params["cstar_lo"] = num(lo);
  d.params["cstar_hi"] = num(dbl.back().second);
  if (lo > 0.0L) {
    d.verdict = Verdict::Convergent;
    d.rigorous = true;
    d.method = "boundary-lower-bound";
    d.note = "C*(p_c) > 0";
    return d;
  }
  if (tree.rule().zero_cstar_certified(pc)) {
    d.verdict = Verdict::Divergent;
    d.rigorous = true;
    d.method = "component-decomposition";
    d.note = "every infinite branch lies in the spine ray or in a component with C* = 0 at p_c";
    return d;
  }
  classify_resistance(d, dbl, opts.delta);
  return d;
}

FubiniResult fubini_identity_check(std::size_t k, const PreciseProb& pc) {
  if (k < 1) throw std::invalid_argument("fubini check: k must be >= 1");
  if (!pc.in_open_unit()) throw std::invalid_argument("fubini check: p_c must lie in (0,1)");
  const long double lp = pc.log();
  const long double km1 = static_cast<long double>(k - 1);
  FubiniResult r;
  // p = e^s, p^-k dp = e^{-(k-1)s} ds
  auto f = [km1](long double s) { return std::exp(-km1 * s); };
  r.numeric = boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(f, lp, 0.0L, 10, 1e-16L);
  r.closed_form = k == 1 ? -lp : std::expm1(-km1 * lp) / km1;
  r.residual = std::fabs(r.numeric - r.closed_form) / std::max(1.0L, std::fabs(r.closed_form));
  return r;
}

nlohmann::json EnergyChainReport::to_json() const {
  nlohmann::json j;
  j["K"] = K;
  j["bound_K"] = num(bound_K);
  j["tail"] = num(tail);
  j["tail_rigorous"] = tail_rigorous;
  j["cstar_lo"] = num(cstar_lo);
  j["all_hold"] = all_hold;
  j["min_slack"] = num(min_slack);
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) rs.push_back({{"n", r.n}, {"lhs", num(r.lhs)}, {"bound_n", num(r.bound_n)}, {"slack", num(r.slack)}, {"holds", r.holds}});
  j["rows"] = rs;
  nlohmann::json w = nlohmann::json::array();
  for (std::size_t k = 1; k < wstar.size(); ++k) w.push_back(num(wstar[k]));
  j["wstar"] = w;
  return j;
}

namespace {

long double chain_coefficient(std::size_t k, long double lpc) {
  if (k == 1) return -lpc;
  long double km1 = static_cast<long double>(k - 1);
  return static_cast<long double>(k) * (-std::expm1(km1 * lpc)) / km1;
}

}  // namespace

EnergyChainReport energy_bound_chain(const GeneralTree& tree, const PreciseProb& pc, std::size_t K) {
  if (!pc.in_open_unit()) throw std::invalid_argument("energy chain: p_c must lie in (0,1)");
  if (K < 1) throw std::invalid_argument("energy chain: K must be >= 1");
  tree.check_depth(K);
  KindLayers all = build_layers(tree, K);
  ConductanceModel star{ConductanceKind::Dynamical, Normalization::PaperLiteral, pc};

  EnergyChainReport rep;
  rep.K = K;
  const ChildSequence* ss = tree.as_spherical();
  if (ss) {
    auto b = conductance_bracket_ss(*ss, star, std::max<std::size_t>(K, 1));
    rep.cstar_lo = b.rigorous ? b.lo : 0.0L;
  } else {
    rep.cstar_lo = effective_conductance_layered(all, star, Boundary::LowerBound);
  }
  if (!(rep.cstar_lo > 0.0L)) throw Inapplicable("C*(p_c) bracket contains 0; the energy chain does not apply");

  const long double lpc = pc.log();
  auto wstar_of = [&](const KindLayers& L) {
    auto fs = level_flow_squares(L, star);
    std::vector<long double> w(fs.size(), 0.0L);
    for (std::size_t k = 1; k < fs.size(); ++k) w[k] = fs[k] / star.at_level(k);
    return w;
  };
  auto bound_of = [&](const std::vector<long double>& w) {
    KahanSum s;
    for (std::size_t k = 1; k < w.size(); ++k) s.add(chain_coefficient(k, lpc) * w[k]);
    return pc.value() * s.value();
  };
  rep.wstar = wstar_of(all);
  rep.bound_K = bound_of(rep.wstar);
  if (ss) {
    auto env = ss->envelope();
    std::optional<long double> t;
    if (env) t = series_tail_upper(*env, pc, K, 1);
    if (t) {
      rep.tail = 2.0L * pc.value() * *t;
      rep.tail_rigorous = true;
    }
  }
  const long double total = rep.bound_K + rep.tail;
  ConductanceModel perc{ConductanceKind::Percolation, Normalization::PaperLiteral, pc};
  rep.all_hold = true;
  rep.min_slack = std::numeric_limits<long double>::infinity();
  for (std::size_t n = 1; n <= K; ++n) {
    KindLayers L = n == K ? all : all.prefix(n);
    auto integrand = [&](long double s) {
      ConductanceModel m = perc;
      m.p = PreciseProb(std::exp(s));
      if (s >= 0.0L) m.p = PreciseProb(1.0L - 1e-18L);
      return std::exp(s) / effective_conductance_layered(L, m, Boundary::Wired);
    };
    EnergyChainRow row;
    row.n = n;
    row.lhs = boost::math::quadrature::gauss_kronrod<long double, 31>::integrate(integrand, lpc, 0.0L, 10, 1e-16L);
    row.bound_n = bound_of(wstar_of(L));
    row.slack = total - row.lhs;
    row.holds = row.lhs <= row.bound_n * (1.0L + 1e-12L) && row.slack > 0.0L;
    rep.all_hold = rep.all_hold && row.holds;
    rep.min_slack = std::min(rep.min_slack, row.slack);
    rep.rows.push_back(row);
  }
  return rep;
}

nlohmann::json ExceptionalTimesVerdict::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  j["justification"] = justification;
  j["spherical"] = spherical;
  j["pc_in_unit_interval"] = pc_in_unit;
  j["theta_zero_certified"] = theta_zero_certified;
  j["theta_at_pc_decreasing"] = theta_decreasing;
  nlohmann::json th = nlohmann::json::array();
  for (const auto& [n, v] : theta_at_pc) th.push_back({n, num(v)});
  j["theta_at_pc"] = th;
  j["series"] = series ? series->to_json() : nlohmann::json();
  j["integral"] = integral ? integral->to_json() : nlohmann::json();
  j["cstar"] = cstar ? cstar->to_json() : nlohmann::json();
  j["contradiction"] = contradiction;
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  j["caveat"] = "verdicts assume theta(p_c) = 0 and p_c in (0,1); numerics supply evidence, not proof";
  return j;
}

ExceptionalTimesVerdict exceptional_times_verdict(const GeneralTree& tree, const PreciseProb& pc,
                                                  const VerdictOptions& opts) {
  ExceptionalTimesVerdict v;
  v.pc_in_unit = pc.in_open_unit();
  if (!v.pc_in_unit) {
    v.justification = "p_c outside (0,1); criteria inapplicable";
    return v;
  }
  const ChildSequence* ss = tree.as_spherical();
  v.spherical = ss != nullptr;
  v.theta_zero_certified = tree.rule().zero_theta_certified(pc);
  {
    std::size_t top = opts.theta_depth ? opts.theta_depth : (ss ? kSphericalDepthBudget : 64);
    if (tree.depth_bound()) top = std::min(top, *tree.depth_bound());
    std::optional<KindLayers> layers;
    if (!ss) layers = build_layers(tree, top);
    for (std::size_t n = 1; n <= top; n *= 2) {
      long double t = ss ? theta_truncated(*ss, pc, n) : theta_truncated(layers->prefix(n), pc);
      v.theta_at_pc.emplace_back(n, t);
    }
    v.theta_decreasing = true;
    for (std::size_t i = 1; i < v.theta_at_pc.size(); ++i)
      if (!(v.theta_at_pc[i].second < v.theta_at_pc[i - 1].second)) v.theta_decreasing = false;
  }

  if (opts.run_integral) v.integral = integral_reciprocal_theta(tree, pc, opts.integral);
  v.cstar = cstar_zero_test(tree, pc, opts.cstar);

  if (ss) {
    v.series = series_criterion_ss(*ss, pc, opts.series);
    bool any_div = false, any_conv = false;
    std::string div_routes, conv_routes;
    auto take = [&](const std::optional<DivergenceDiagnosis>& d, const char* name) {
      if (!d) return;
      if (d->verdict == Verdict::Divergent) {
        any_div = true;
        div_routes += div_routes.empty() ? name : std::string(", ") + name;
      }
      if (d->verdict == Verdict::Convergent) {
        any_conv = true;
        conv_routes += conv_routes.empty() ? name : std::string(", ") + name;
      }
    };
    take(v.series, "series");
    take(v.integral, "integral");
    take(v.cstar, "cstar");
    if (any_div && any_conv) {
      v.contradiction = true;
      v.diagnostic = "divergent via [" + div_routes + "] but convergent via [" + conv_routes + "]";
      v.justification = "spherically symmetric equivalence violated; no verdict";
      return v;
    }
    if (any_div) {
      v.verdict = ExceptionalVerdict::NoExceptionalTimes;
      v.justification = "spherically symmetric equivalence: divergent via [" + div_routes + "]";
    } else if (any_conv) {
      v.verdict = ExceptionalVerdict::ExceptionalTimesExist;
      v.justification = "spherically symmetric equivalence: convergent via [" + conv_routes + "]";
    } else {
      v.justification = "all spherically symmetric routes inconclusive";
    }
    return v;
  }

  const bool int_div = v.integral && v.integral->verdict == Verdict::Divergent;
  if (int_div && v.cstar->verdict == Verdict::Convergent) {
    v.contradiction = true;
    v.diagnostic = "divergent integral but C*(p_c) > 0";
    v.justification = "divergent-integral implication contradicts the C* characterization; no verdict";
    return v;
  }
  if (int_div) {
    v.verdict = ExceptionalVerdict::NoExceptionalTimes;
    v.justification = "divergent-integral implication";
    return v;
  }
  switch (v.cstar->verdict) {
    case Verdict::Divergent:
      v.verdict = ExceptionalVerdict::NoExceptionalTimes;
      v.justification = "C* characterization: C*(p_c) = 0";
      if (v.integral && v.integral->verdict == Verdict::Convergent)
        v.justification += " despite a convergent integral (the converse implication fails)";
      break;
    case Verdict::Convergent:
      v.verdict = ExceptionalVerdict::ExceptionalTimesExist;
      v.justification = "C* characterization: C*(p_c) > 0";
      break;
    case Verdict::Inconclusive:
      v.justification = "integral not divergent and C* test inconclusive";
      break;
  }
  return v;
}

}  // namespace percotree

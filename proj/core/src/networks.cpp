#include "percotree/networks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "percotree/csv.hpp"
#include "percotree/numeric.hpp"

namespace percotree {

namespace {
constexpr long double kInf = std::numeric_limits<long double>::infinity();

long double series_branch(long double c, long double sub) {
  if (sub == kInf) return c;
  if (sub <= 0.0L) return 0.0L;
  return c * sub / (c + sub);
}

long double normalization_factor(const ConductanceModel& m) {
  if (m.normalization == Normalization::LyonsCorrected) return 1.0L / (1.0L - m.p.value());
  return 1.0L;
}

// running log-sum-exp
struct LogSum {
  long double max = -kInf;
  long double scaled = 0.0L;
  void add(long double t) {
    if (t > max) {
      scaled = (max == -kInf ? 0.0L : scaled * std::exp(max - t)) + 1.0L;
      max = t;
    } else {
      scaled += std::exp(t - max);
    }
  }
  long double log() const { return max + std::log(scaled); }
};
}  // namespace

std::string to_string(ConductanceKind k) {
  switch (k) {
    case ConductanceKind::Percolation:
      return "percolation";
    case ConductanceKind::Dynamical:
      return "dynamical";
    case ConductanceKind::Custom:
      return "custom";
  }
  return "?";
}

std::string to_string(Normalization n) {
  return n == Normalization::PaperLiteral ? "paper-literal" : "lyons-corrected";
}

ConductanceKind parse_kind(const std::string& s) {
  if (s == "percolation") return ConductanceKind::Percolation;
  if (s == "dynamical") return ConductanceKind::Dynamical;
  if (s == "custom") return ConductanceKind::Custom;
  throw std::invalid_argument("unknown conductance kind '" + s + "'");
}

Normalization parse_normalization(const std::string& s) {
  if (s == "paper-literal" || s == "literal") return Normalization::PaperLiteral;
  if (s == "lyons-corrected" || s == "lyons") return Normalization::LyonsCorrected;
  throw std::invalid_argument("unknown normalization '" + s + "'");
}

void ConductanceModel::validate() const {
  if (kind == ConductanceKind::Custom) return;
  if (!p.in_open_unit()) throw std::invalid_argument("p must lie in (0,1), got " + p.str());
}

long double ConductanceModel::at_level(std::size_t k) const {
  if (kind == ConductanceKind::Custom) throw std::logic_error("custom conductances have no level formula");
  long double c = std::exp(static_cast<long double>(k) * p.log());
  if (kind == ConductanceKind::Dynamical) c *= static_cast<long double>(k);
  return c * normalization_factor(*this);
}

WeightedNetwork::WeightedNetwork(std::shared_ptr<const TreeTruncation> trunc, const ConductanceModel& model)
    : trunc_(std::move(trunc)), model_(model) {
  if (model.kind == ConductanceKind::Custom)
    throw std::invalid_argument("use WeightedNetwork::custom for per-edge tables");
  model.validate();
  std::vector<long double> per_level(trunc_->depth + 1, 0.0L);
  for (std::size_t k = 1; k <= trunc_->depth; ++k) per_level[k] = model.at_level(k);
  c_.resize(trunc_->edge_count());
  for (std::size_t k = 1; k <= trunc_->depth; ++k)
    for (std::uint32_t v = trunc_->level_offset[k]; v < trunc_->level_offset[k + 1]; ++v) c_[v - 1] = per_level[k];
}

WeightedNetwork WeightedNetwork::custom(std::shared_ptr<const TreeTruncation> trunc,
                                        std::vector<long double> conductance) {
  if (conductance.size() != trunc->edge_count())
    throw std::invalid_argument("custom network: conductance table size does not match edge count");
  for (auto c : conductance)
    if (!(c > 0.0L) || !std::isfinite(c)) throw std::invalid_argument("custom network: conductances must be positive");
  WeightedNetwork net;
  net.trunc_ = std::move(trunc);
  net.c_ = std::move(conductance);
  net.model_.kind = ConductanceKind::Custom;
  return net;
}

long double unit_flow_violation(const UnitFlow& f) {
  const TreeTruncation& t = *f.trunc;
  long double worst = 0.0L;
  for (std::uint32_t v = 0; v < t.vertex_count(); ++v) {
    if (t.is_boundary(v)) continue;
    long double out = 0.0L;
    for (std::uint32_t w = t.first_child[v]; w < t.first_child[v + 1]; ++w) {
      if (f.flow[w - 1] < 0.0L) worst = std::max(worst, -f.flow[w - 1]);
      out += f.flow[w - 1];
    }
    long double in = v == 0 ? 1.0L : f.flow[v - 1];
    worst = std::max(worst, std::fabs(out - in));
  }
  return worst;
}

long double effective_conductance_ss(const ChildSequence& seq, const ConductanceModel& model, std::size_t n) {
  if (n == 0) throw std::invalid_argument("effective_conductance_ss: n must be >= 1");
  if (model.kind == ConductanceKind::Custom) throw std::invalid_argument("closed form needs a level model");
  model.validate();
  auto ls = seq.log_level_sizes(n);
  const long double lp = model.p.log();
  LogSum acc;
  for (std::size_t k = 1; k <= n; ++k) {
    long double t = -static_cast<long double>(k) * lp - ls[k];
    if (model.kind == ConductanceKind::Dynamical) t -= std::log(static_cast<long double>(k));
    acc.add(t);
  }
  return std::exp(-acc.log()) * normalization_factor(model);
}

std::vector<ConductanceBracket> conductance_sequence_ss(const ChildSequence& seq, const ConductanceModel& model,
                                                        std::size_t n) {
  if (n == 0) throw std::invalid_argument("conductance_sequence_ss: n must be >= 1");
  if (model.kind == ConductanceKind::Custom) throw std::invalid_argument("closed form needs a level model");
  model.validate();
  auto ls = seq.log_level_sizes(n);
  auto env = seq.envelope();
  const int extra = model.kind == ConductanceKind::Dynamical ? 1 : 0;
  const long double lp = model.p.log();
  const long double nf = normalization_factor(model);
  std::vector<ConductanceBracket> out;
  out.reserve(n);
  LogSum acc;
  for (std::size_t k = 1; k <= n; ++k) {
    long double t = -static_cast<long double>(k) * lp - ls[k];
    if (extra) t -= std::log(static_cast<long double>(k));
    acc.add(t);
    ConductanceBracket b;
    b.n = k;
    long double lr = acc.log();
    b.value = std::exp(-lr) * nf;
    b.hi = b.value;
    std::optional<long double> tail;
    if (env) tail = series_tail_upper(*env, model.p, k, extra);
    if (tail) {
      // 1 / (R + tail) computed relative to R
      b.lo = std::exp(-lr) / (1.0L + *tail * std::exp(-lr)) * nf;
      b.rigorous = true;
    } else if (env && series_diverges(*env, model.p, extra)) {
      b.lo = 0.0L;
      b.rigorous = true;
    }
    out.push_back(b);
  }
  return out;
}

ConductanceBracket conductance_bracket_ss(const ChildSequence& seq, const ConductanceModel& model, std::size_t n) {
  return conductance_sequence_ss(seq, model, n).back();
}

std::vector<long double> branch_conductances(const WeightedNetwork& net) {
  const TreeTruncation& t = net.truncation();
  if (t.depth == 0) throw std::invalid_argument("network has no edges");
  std::vector<long double> sub(t.vertex_count(), kInf);
  std::vector<long double> br(t.edge_count());
  for (std::size_t v = t.vertex_count(); v-- > 0;) {
    auto vv = static_cast<std::uint32_t>(v);
    if (t.is_boundary(vv)) continue;
    long double s = 0.0L;
    for (std::uint32_t w = t.first_child[vv]; w < t.first_child[vv + 1]; ++w) {
      br[w - 1] = series_branch(net.conductance(w - 1), sub[w]);
      s += br[w - 1];
    }
    sub[v] = s;
  }
  return br;
}

long double effective_conductance_reduce(const WeightedNetwork& net) {
  const TreeTruncation& t = net.truncation();
  auto br = branch_conductances(net);
  long double s = 0.0L;
  for (std::uint32_t w = t.first_child[0]; w < t.first_child[1]; ++w) s += br[w - 1];
  return s;
}

namespace {

long double boundary_conductance(const KindLayers& layers, std::size_t idx, const ConductanceModel& model,
                                 Boundary boundary) {
  if (boundary == Boundary::Wired) return kInf;
  const std::size_t n = layers.depth();
  auto r = layers.rule->resistance_upper(layers.layers[n].kinds[idx], model.p);
  if (!r || !(*r > 0.0L)) return 0.0L;
  long double c = std::exp(static_cast<long double>(n) * model.p.log()) / *r;
  if (model.kind == ConductanceKind::Dynamical) c *= static_cast<long double>(n + 1);
  return c * normalization_factor(model);
}

// subtree conductance of every kind on every level
std::vector<std::vector<long double>> layered_subtree(const KindLayers& layers, const ConductanceModel& model,
                                                      Boundary boundary) {
  const std::size_t n = layers.depth();
  std::vector<std::vector<long double>> sub(n + 1);
  sub[n].resize(layers.layers[n].kinds.size());
  for (std::size_t i = 0; i < sub[n].size(); ++i) sub[n][i] = boundary_conductance(layers, i, model, boundary);
  for (std::size_t k = n; k-- > 0;) {
    const auto& L = layers.layers[k];
    const long double c = model.at_level(k + 1);
    sub[k].assign(L.kinds.size(), 0.0L);
    for (std::size_t i = 0; i < L.kinds.size(); ++i) {
      long double s = 0.0L;
      for (std::uint32_t j = L.child_begin[i]; j < L.child_begin[i + 1]; ++j)
        s += static_cast<long double>(L.child_mult[j]) * series_branch(c, sub[k + 1][L.child_index[j]]);
      sub[k][i] = s;
    }
  }
  return sub;
}

}  // namespace

long double effective_conductance_layered(const KindLayers& layers, const ConductanceModel& model,
                                          Boundary boundary) {
  if (layers.depth() == 0) throw std::invalid_argument("network has no edges");
  if (model.kind == ConductanceKind::Custom) throw std::invalid_argument("layered reduction needs a level model");
  model.validate();
  return layered_subtree(layers, model, boundary)[0][0];
}

std::vector<long double> level_flow_squares(const KindLayers& layers, const ConductanceModel& model) {
  if (layers.depth() == 0) throw std::invalid_argument("network has no edges");
  model.validate();
  const std::size_t n = layers.depth();
  auto sub = layered_subtree(layers, model, Boundary::Wired);
  std::vector<long double> out(n + 1, 0.0L);
  std::vector<long double> s2{1.0L};
  for (std::size_t k = 0; k < n; ++k) {
    const auto& L = layers.layers[k];
    const long double c = model.at_level(k + 1);
    std::vector<long double> next(layers.layers[k + 1].kinds.size(), 0.0L);
    for (std::size_t i = 0; i < L.kinds.size(); ++i) {
      if (s2[i] == 0.0L) continue;
      for (std::uint32_t j = L.child_begin[i]; j < L.child_begin[i + 1]; ++j) {
        long double share = series_branch(c, sub[k + 1][L.child_index[j]]) / sub[k][i];
        next[L.child_index[j]] += s2[i] * static_cast<long double>(L.child_mult[j]) * share * share;
      }
    }
    long double tot = 0.0L;
    for (auto v : next) tot += v;
    out[k + 1] = tot;
    s2 = std::move(next);
  }
  return out;
}

UnitFlow min_energy_unit_flow(const WeightedNetwork& net) {
  const TreeTruncation& t = net.truncation();
  auto br = branch_conductances(net);
  UnitFlow f;
  f.trunc = net.truncation_ptr();
  f.flow.assign(t.edge_count(), 0.0L);
  for (std::uint32_t v = 0; v < t.vertex_count(); ++v) {
    if (t.is_boundary(v)) continue;
    long double in = v == 0 ? 1.0L : f.flow[v - 1];
    long double tot = 0.0L;
    for (std::uint32_t w = t.first_child[v]; w < t.first_child[v + 1]; ++w) tot += br[w - 1];
    if (!(tot > 0.0L)) throw std::domain_error("zero effective conductance below a vertex");
    for (std::uint32_t w = t.first_child[v]; w < t.first_child[v + 1]; ++w) f.flow[w - 1] = in * br[w - 1] / tot;
  }
  return f;
}

namespace {
void check_same(const UnitFlow& flow, const WeightedNetwork& net) {
  if (flow.trunc == net.truncation_ptr()) return;
  if (!flow.trunc || flow.trunc->parent != net.truncation().parent)
    throw std::invalid_argument("flow and network live on different truncations");
}
}  // namespace

long double flow_energy(const UnitFlow& flow, const WeightedNetwork& net) {
  check_same(flow, net);
  KahanSum s;
  for (std::size_t e = 0; e < flow.flow.size(); ++e) s.add(flow.flow[e] * flow.flow[e] / net.conductance(e));
  return s.value();
}

std::vector<long double> energy_by_level(const UnitFlow& flow, const WeightedNetwork& net) {
  check_same(flow, net);
  const TreeTruncation& t = net.truncation();
  std::vector<long double> out(t.depth + 1, 0.0L);
  for (std::size_t k = 1; k <= t.depth; ++k) {
    KahanSum s;
    for (std::uint32_t v = t.level_offset[k]; v < t.level_offset[k + 1]; ++v)
      s.add(flow.flow[v - 1] * flow.flow[v - 1] / net.conductance(v - 1));
    out[k] = s.value();
  }
  return out;
}

void write_conductance_csv_rows(std::ostream& os, const std::string& tree_id, const ConductanceModel& model,
                                const std::vector<ConductanceBracket>& rows) {
  for (const auto& r : rows) {
    os << tree_id << "," << to_string(model.kind) << "," << to_string(model.normalization) << ","
       << fmt_num(model.p.value()) << "," << r.n << "," << fmt_num(r.value) << ","
       << (r.rigorous ? fmt_num(r.lo) : std::string()) << "," << fmt_num(r.hi) << "\n";
  }
}

}  // namespace percotree

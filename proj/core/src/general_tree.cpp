#include "percotree/general_tree.hpp"

#include <algorithm>
#include <sstream>

namespace percotree {

DepthBoundError::DepthBoundError(std::size_t req, std::size_t b)
    : std::runtime_error("requested depth " + std::to_string(req) + " exceeds the tree's depth bound " +
                         std::to_string(b)),
      requested(req),
      bound(b) {}

std::uint64_t KindInterner::id(std::uint64_t component, std::uint64_t inner) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(component, inner);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  std::uint64_t v = pairs_.size();
  ids_.emplace(key, v);
  pairs_.push_back(key);
  return v;
}

std::pair<std::uint64_t, std::uint64_t> KindInterner::lookup(std::uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return pairs_.at(id);
}

// ---- spherical ----

void SphericalRule::expand(std::uint64_t kind, std::vector<Branch>& out) const {
  out.push_back({kind + 1, seq_.children(kind)});
}

std::optional<long double> SphericalRule::resistance_upper(std::uint64_t kind, const PreciseProb& p) const {
  return seq_.subtree_resistance_upper(kind, p);
}

bool SphericalRule::zero_theta_certified(const PreciseProb& p) const {
  auto env = seq_.envelope();
  return env && series_diverges(*env, p, 0);
}

bool SphericalRule::zero_cstar_certified(const PreciseProb& p) const {
  auto env = seq_.envelope();
  return env && series_diverges(*env, p, 1);
}

// ---- multitype ----

namespace {

class MultiTypeRule final : public TreeRule {
 public:
  MultiTypeRule(std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> types, std::size_t root,
                std::vector<std::string> names)
      : types_(std::move(types)), root_(root), names_(std::move(names)) {
    if (types_.empty()) throw std::invalid_argument("multitype: no types");
    if (root_ >= types_.size()) throw std::invalid_argument("multitype: root type out of range");
    for (const auto& t : types_) {
      std::uint64_t total = 0;
      for (const auto& [ty, m] : t) {
        if (ty >= types_.size()) throw std::invalid_argument("multitype: child type out of range");
        total += m;
      }
      if (total == 0) throw std::invalid_argument("multitype: every type needs at least one child");
    }
  }
  std::uint64_t root_kind() const override { return root_; }
  void expand(std::uint64_t kind, std::vector<Branch>& out) const override {
    for (const auto& [ty, m] : types_.at(kind))
      if (m) out.push_back({ty, m});
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "multitype(" << types_.size() << " types)";
    return os.str();
  }

 private:
  std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> types_;
  std::size_t root_;
  std::vector<std::string> names_;
};

class PathRule final : public TreeRule {
 public:
  PathRule(std::function<std::uint64_t(std::span<const std::uint64_t>)> f, std::string name)
      : f_(std::move(f)), name_(std::move(name)) {
    root_ = interner_.id(~0ULL, 0);
  }
  std::uint64_t root_kind() const override { return root_; }
  void expand(std::uint64_t kind, std::vector<Branch>& out) const override {
    std::vector<std::uint64_t> path;
    for (std::uint64_t k = kind; k != root_;) {
      auto [parent, idx] = interner_.lookup(k);
      path.push_back(idx);
      k = parent;
    }
    std::reverse(path.begin(), path.end());
    std::uint64_t n = f_(path);
    if (n == 0) throw std::invalid_argument(name_ + ": rule returned zero children");
    for (std::uint64_t i = 0; i < n; ++i) out.push_back({interner_.id(kind, i), 1});
  }
  std::string describe() const override { return name_; }

 private:
  std::function<std::uint64_t(std::span<const std::uint64_t>)> f_;
  std::string name_;
  KindInterner interner_;
  std::uint64_t root_ = 0;
};

}  // namespace

// ---- glue ----

GlueRule::GlueRule(std::vector<std::pair<GeneralTree, std::uint64_t>> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw std::invalid_argument("glue_at_root: empty list");
  interner_.id(~0ULL, 0);
}

void GlueRule::expand(std::uint64_t kind, std::vector<Branch>& out) const {
  std::vector<Branch> inner;
  if (kind == 0) {
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      inner.clear();
      const TreeRule& r = comps_[c].first.rule();
      r.expand(r.root_kind(), inner);
      for (const auto& b : inner) out.push_back({interner_.id(c, b.kind), b.multiplicity * comps_[c].second});
    }
    return;
  }
  auto [c, k] = interner_.lookup(kind);
  comps_[c].first.rule().expand(k, inner);
  for (const auto& b : inner) out.push_back({interner_.id(c, b.kind), b.multiplicity});
}

std::string GlueRule::describe() const {
  std::ostringstream os;
  os << "glue(";
  for (std::size_t c = 0; c < comps_.size(); ++c)
    os << (c ? ", " : "") << comps_[c].second << "x" << comps_[c].first.describe();
  os << ")";
  return os.str();
}

std::optional<long double> GlueRule::resistance_upper(std::uint64_t kind, const PreciseProb& p) const {
  if (kind == 0) return std::nullopt;
  auto [c, k] = interner_.lookup(kind);
  return comps_[c].first.rule().resistance_upper(k, p);
}

bool GlueRule::zero_theta_certified(const PreciseProb& p) const {
  return std::all_of(comps_.begin(), comps_.end(),
                     [&](const auto& c) { return c.first.rule().zero_theta_certified(p); });
}

bool GlueRule::zero_cstar_certified(const PreciseProb& p) const {
  return std::all_of(comps_.begin(), comps_.end(),
                     [&](const auto& c) { return c.first.rule().zero_cstar_certified(p); });
}

// ---- spine ----

SpineRule::SpineRule(ComponentFn component, std::string name, CertificateFn components_subcritical)
    : make_(std::move(component)), name_(std::move(name)), subcritical_(std::move(components_subcritical)) {
  interner_.id(0, 0);
}

std::uint64_t SpineRule::root_kind() const { return 0; }

GeneralTree SpineRule::component(std::size_t i) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(i);
    if (it != cache_.end()) return it->second;
  }
  GeneralTree t = make_(i);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(i, std::move(t)).first->second;
}

void SpineRule::expand(std::uint64_t kind, std::vector<Branch>& out) const {
  auto [c, k] = interner_.lookup(kind);
  std::vector<Branch> inner;
  if (c == 0) {
    out.push_back({interner_.id(0, k + 1), 1});
    if (k == 0) return;
    GeneralTree t = component(k);
    t.rule().expand(t.rule().root_kind(), inner);
    for (const auto& b : inner) out.push_back({interner_.id(k, b.kind), b.multiplicity});
    return;
  }
  GeneralTree t = component(c);
  t.rule().expand(k, inner);
  for (const auto& b : inner) out.push_back({interner_.id(c, b.kind), b.multiplicity});
}

std::optional<long double> SpineRule::resistance_upper(std::uint64_t kind, const PreciseProb& p) const {
  auto [c, k] = interner_.lookup(kind);
  if (c == 0) return std::nullopt;
  return component(c).rule().resistance_upper(k, p);
}

bool SpineRule::zero_theta_certified(const PreciseProb& p) const {
  return PreciseProb::compare(p, 1.0L) < 0 && subcritical_ && subcritical_(p);
}

bool SpineRule::zero_cstar_certified(const PreciseProb& p) const {
  return PreciseProb::compare(p, 1.0L) < 0 && subcritical_ && subcritical_(p);
}

// ---- GeneralTree ----

GeneralTree GeneralTree::spherical(const ChildSequence& seq) {
  return GeneralTree(std::make_shared<SphericalRule>(seq));
}

GeneralTree GeneralTree::multitype(std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> types,
                                   std::size_t root_type, std::vector<std::string> names) {
  return GeneralTree(std::make_shared<MultiTypeRule>(std::move(types), root_type, std::move(names)));
}

GeneralTree GeneralTree::from_path_rule(std::function<std::uint64_t(std::span<const std::uint64_t>)> rule,
                                        std::string name, std::size_t depth_bound) {
  return GeneralTree(std::make_shared<PathRule>(std::move(rule), std::move(name)), depth_bound);
}

void GeneralTree::check_depth(std::size_t n) const {
  if (depth_bound_ && n > *depth_bound_) throw DepthBoundError(n, *depth_bound_);
}

std::uint64_t GeneralTree::kind_of(std::span<const std::uint64_t> path) const {
  check_depth(path.size());
  std::uint64_t kind = rule_->root_kind();
  std::vector<Branch> br;
  for (std::uint64_t idx : path) {
    br.clear();
    rule_->expand(kind, br);
    std::uint64_t acc = 0;
    bool found = false;
    for (const auto& b : br) {
      if (idx < acc + b.multiplicity) {
        kind = b.kind;
        found = true;
        break;
      }
      acc += b.multiplicity;
    }
    if (!found) throw std::out_of_range("path names a child index that does not exist");
  }
  return kind;
}

std::uint64_t GeneralTree::children_of(std::span<const std::uint64_t> path) const {
  std::uint64_t kind = kind_of(path);
  std::vector<Branch> br;
  rule_->expand(kind, br);
  std::uint64_t total = 0;
  for (const auto& b : br) total += b.multiplicity;
  return total;
}

GeneralTree glue_at_root(const std::vector<GeneralTree>& trees) {
  if (trees.empty()) throw std::invalid_argument("glue_at_root: empty list");
  if (trees.size() == 1) return trees.front();
  std::vector<std::pair<GeneralTree, std::uint64_t>> comps;
  for (const auto& t : trees) {
    auto it = std::find_if(comps.begin(), comps.end(),
                           [&](const auto& c) { return c.first.rule_ptr() == t.rule_ptr(); });
    if (it != comps.end()) {
      ++it->second;
    } else {
      comps.emplace_back(t, 1);
    }
  }
  std::optional<std::size_t> bound;
  for (const auto& t : trees)
    if (t.depth_bound()) bound = bound ? std::min(*bound, *t.depth_bound()) : *t.depth_bound();

  // copies of one spherically symmetric tree stay spherically symmetric
  const ChildSequence* first = comps.front().first.as_spherical();
  bool same = first != nullptr;
  std::uint64_t total = 0;
  for (const auto& [t, m] : comps) {
    const ChildSequence* s = t.as_spherical();
    if (!s || !s->with_root_multiplier(1).same_rule(first->with_root_multiplier(1)) ||
        s->root_multiplier() != 1) {
      same = false;
      break;
    }
    total += m;
  }
  if (same && first->root_multiplier() == 1) {
    return GeneralTree(std::make_shared<SphericalRule>(first->with_root_multiplier(total)), bound);
  }
  return GeneralTree(std::make_shared<GlueRule>(std::move(comps)), bound);
}

// ---- layers ----

std::size_t KindLayers::kind_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.kinds.size();
  return n;
}

KindLayers KindLayers::prefix(std::size_t n) const {
  if (n > depth()) throw std::out_of_range("prefix deeper than the layers");
  KindLayers out;
  out.rule = rule;
  out.layers.assign(layers.begin(), layers.begin() + static_cast<std::ptrdiff_t>(n + 1));
  auto& last = out.layers.back();
  last.child_begin.assign(last.kinds.size() + 1, 0);
  last.child_index.clear();
  last.child_mult.clear();
  return out;
}

KindLayers build_layers(const GeneralTree& tree, std::size_t n, std::size_t max_kinds) {
  tree.check_depth(n);
  KindLayers out;
  out.rule = tree.rule_ptr();
  const TreeRule& rule = tree.rule();
  out.layers.resize(n + 1);
  out.layers[0].kinds.push_back(rule.root_kind());
  out.layers[0].count.push_back(1.0L);
  std::size_t total = 1;
  std::vector<Branch> br;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::unordered_map<std::uint64_t, std::uint64_t> merged;
  for (std::size_t k = 0; k < n; ++k) {
    auto& cur = out.layers[k];
    auto& next = out.layers[k + 1];
    index.clear();
    cur.child_begin.assign(1, 0);
    for (std::size_t i = 0; i < cur.kinds.size(); ++i) {
      br.clear();
      rule.expand(cur.kinds[i], br);
      std::size_t start = cur.child_index.size();
      for (const auto& b : br) {
        auto [it, fresh] = index.emplace(b.kind, static_cast<std::uint32_t>(next.kinds.size()));
        if (fresh) {
          next.kinds.push_back(b.kind);
          next.count.push_back(0.0L);
        }
        std::uint32_t ci = it->second;
        next.count[ci] += cur.count[i] * static_cast<long double>(b.multiplicity);
        bool dup = false;
        for (std::size_t j = start; j < cur.child_index.size(); ++j) {
          if (cur.child_index[j] == ci) {
            cur.child_mult[j] += b.multiplicity;
            dup = true;
            break;
          }
        }
        if (!dup) {
          cur.child_index.push_back(ci);
          cur.child_mult.push_back(b.multiplicity);
        }
      }
      cur.child_begin.push_back(static_cast<std::uint32_t>(cur.child_index.size()));
    }
    total += next.kinds.size();
    if (total > max_kinds)
      throw std::length_error("kind layers exceed " + std::to_string(max_kinds) + " kinds at level " +
                              std::to_string(k + 1));
  }
  out.layers[n].child_begin.assign(out.layers[n].kinds.size() + 1, 0);
  return out;
}

BigInt level_size(const GeneralTree& tree, std::size_t k) {
  if (const ChildSequence* s = tree.as_spherical()) {
    tree.check_depth(k);
    return s->level_size(k);
  }
  KindLayers L = build_layers(tree, k);
  std::vector<BigInt> cnt{BigInt(1)};
  for (std::size_t lvl = 0; lvl < k; ++lvl) {
    const auto& cur = L.layers[lvl];
    std::vector<BigInt> next(L.layers[lvl + 1].kinds.size());
    for (std::size_t i = 0; i < cur.kinds.size(); ++i)
      for (std::uint32_t j = cur.child_begin[i]; j < cur.child_begin[i + 1]; ++j)
        next[cur.child_index[j]] += cnt[i] * cur.child_mult[j];
    cnt = std::move(next);
  }
  BigInt total = 0;
  for (const auto& c : cnt) total += c;
  return total;
}

BigInt level_size(const ChildSequence& seq, std::size_t k) { return seq.level_size(k); }

}  // namespace percotree

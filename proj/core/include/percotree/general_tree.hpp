#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "percotree/child_sequence.hpp"

namespace percotree {

struct Branch {
  std::uint64_t kind;
  std::uint64_t multiplicity;
};

// A tree as a deterministic rule over vertex kinds: all vertices of one kind
// have isomorphic subtrees.
class TreeRule {
 public:
  virtual ~TreeRule() = default;
  virtual std::uint64_t root_kind() const = 0;
  virtual void expand(std::uint64_t kind, std::vector<Branch>& out) const = 0;
  virtual std::string describe() const = 0;

  // Upper bound on sum_{k>=1} p^-k / |S_k| for the subtree S below a vertex of this kind.
  virtual std::optional<long double> resistance_upper(std::uint64_t, const PreciseProb&) const {
    return std::nullopt;
  }
  virtual bool zero_theta_certified(const PreciseProb&) const { return false; }
  virtual bool zero_cstar_certified(const PreciseProb&) const { return false; }
  virtual const ChildSequence* spherical() const { return nullptr; }
};

class DepthBoundError : public std::runtime_error {
 public:
  DepthBoundError(std::size_t requested, std::size_t bound);
  std::size_t requested;
  std::size_t bound;
};

class GeneralTree {
 public:
  GeneralTree() = default;
  explicit GeneralTree(std::shared_ptr<const TreeRule> rule, std::optional<std::size_t> depth_bound = std::nullopt)
      : rule_(std::move(rule)), depth_bound_(depth_bound) {}

  static GeneralTree spherical(const ChildSequence& seq);
  static GeneralTree multitype(std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> types,
                               std::size_t root_type, std::vector<std::string> names = {});
  static GeneralTree from_path_rule(std::function<std::uint64_t(std::span<const std::uint64_t>)> rule,
                                    std::string name, std::size_t depth_bound);

  std::uint64_t children_of(std::span<const std::uint64_t> path) const;
  std::uint64_t kind_of(std::span<const std::uint64_t> path) const;

  const std::optional<std::size_t>& depth_bound() const { return depth_bound_; }
  void check_depth(std::size_t n) const;
  GeneralTree with_depth_bound(std::optional<std::size_t> bound) const { return GeneralTree(rule_, bound); }

  const TreeRule& rule() const { return *rule_; }
  const std::shared_ptr<const TreeRule>& rule_ptr() const { return rule_; }
  const ChildSequence* as_spherical() const { return rule_->spherical(); }
  std::string describe() const { return rule_->describe(); }

 private:
  std::shared_ptr<const TreeRule> rule_;
  std::optional<std::size_t> depth_bound_;
};

// Thread-safe map (component, inner kind) <-> compact id.
class KindInterner {
 public:
  std::uint64_t id(std::uint64_t component, std::uint64_t inner) const;
  std::pair<std::uint64_t, std::uint64_t> lookup(std::uint64_t id) const;

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& v) const {
      return std::hash<std::uint64_t>()(v.first * 0x9E3779B97F4A7C15ULL ^ v.second);
    }
  };
  mutable std::mutex mu_;
  mutable std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t, PairHash> ids_;
  mutable std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs_;
};

class SphericalRule final : public TreeRule {
 public:
  explicit SphericalRule(ChildSequence seq) : seq_(std::move(seq)) {}
  std::uint64_t root_kind() const override { return 0; }
  void expand(std::uint64_t kind, std::vector<Branch>& out) const override;
  std::string describe() const override { return seq_.describe(); }
  std::optional<long double> resistance_upper(std::uint64_t kind, const PreciseProb& p) const override;
  bool zero_theta_certified(const PreciseProb& p) const override;
  bool zero_cstar_certified(const PreciseProb& p) const override;
  const ChildSequence* spherical() const override { return &seq_; }

 private:
  ChildSequence seq_;
};

class GlueRule final : public TreeRule {
 public:
  explicit GlueRule(std::vector<std::pair<GeneralTree, std::uint64_t>> components);
  std::uint64_t root_kind() const override { return 0; }
  void expand(std::uint64_t kind, std::vector<Branch>& out) const override;
  std::string describe() const override;
  std::optional<long double> resistance_upper(std::uint64_t kind, const PreciseProb& p) const override;
  bool zero_theta_certified(const PreciseProb& p) const override;
  bool zero_cstar_certified(const PreciseProb& p) const override;
  const std::vector<std::pair<GeneralTree, std::uint64_t>>& components() const { return comps_; }

 private:
  std::vector<std::pair<GeneralTree, std::uint64_t>> comps_;
  KindInterner interner_;
};

// Infinite ray rho = v_0, v_1, ... with component(i) sharing its root with v_i, i >= 1.
class SpineRule final : public TreeRule {
 public:
  using ComponentFn = std::function<GeneralTree(std::size_t)>;
  using CertificateFn = std::function<bool(const PreciseProb&)>;
  SpineRule(ComponentFn component, std::string name, CertificateFn components_subcritical = nullptr);
  std::uint64_t root_kind() const override;
  void expand(std::uint64_t kind, std::vector<Branch>& out) const override;
  std::string describe() const override { return name_; }
  std::optional<long double> resistance_upper(std::uint64_t kind, const PreciseProb& p) const override;
  bool zero_theta_certified(const PreciseProb& p) const override;
  bool zero_cstar_certified(const PreciseProb& p) const override;
  GeneralTree component(std::size_t i) const;

 private:
  ComponentFn make_;
  std::string name_;
  CertificateFn subcritical_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::size_t, GeneralTree> cache_;
  KindInterner interner_;
};

GeneralTree glue_at_root(const std::vector<GeneralTree>& trees);

// Per-level deduplicated kinds of a truncation.
struct KindLayers {
  struct Layer {
    std::vector<std::uint64_t> kinds;
    std::vector<long double> count;
    std::vector<std::uint32_t> child_begin;
    std::vector<std::uint32_t> child_index;
    std::vector<std::uint64_t> child_mult;
  };
  std::vector<Layer> layers;
  std::shared_ptr<const TreeRule> rule;

  std::size_t depth() const { return layers.empty() ? 0 : layers.size() - 1; }
  std::size_t kind_count() const;
  // Restriction to levels 0..n.
  KindLayers prefix(std::size_t n) const;
};

KindLayers build_layers(const GeneralTree& tree, std::size_t n, std::size_t max_kinds = std::size_t{1} << 24);

BigInt level_size(const GeneralTree& tree, std::size_t k);
BigInt level_size(const ChildSequence& seq, std::size_t k);

}  // namespace percotree

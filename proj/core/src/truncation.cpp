#include "percotree/truncation.hpp"

#include <algorithm>
#include <stdexcept>

namespace percotree {

std::uint32_t TreeTruncation::level_of(std::uint32_t v) const {
  auto it = std::upper_bound(level_offset.begin(), level_offset.end(), v);
  return static_cast<std::uint32_t>(it - level_offset.begin() - 1);
}

Edge TreeTruncation::edge(std::size_t e) const {
  auto child = static_cast<std::uint32_t>(e + 1);
  return Edge{level_of(child), parent[child], child};
}

std::vector<std::uint64_t> TreeTruncation::path_of(std::uint32_t v) const {
  std::vector<std::uint64_t> path;
  while (v != 0) {
    std::uint32_t u = parent[v];
    path.push_back(v - first_child[u]);
    v = u;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::uint32_t TreeTruncation::vertex_at(const std::vector<std::uint64_t>& path) const {
  std::uint32_t v = 0;
  for (auto idx : path) {
    if (first_child[v] + idx >= first_child[v + 1]) throw std::out_of_range("path leaves the truncation");
    v = static_cast<std::uint32_t>(first_child[v] + idx);
  }
  return v;
}

TreeTruncation truncate(const GeneralTree& tree, std::size_t n, std::size_t max_vertices) {
  tree.check_depth(n);
  TreeTruncation t;
  t.depth = n;
  t.rule = tree.rule_ptr();
  const TreeRule& rule = tree.rule();
  t.parent.push_back(0);
  t.kind.push_back(rule.root_kind());
  t.level_offset = {0, 1};
  std::vector<Branch> br;
  for (std::size_t k = 0; k < n; ++k) {
    std::uint32_t lo = t.level_offset[k], hi = t.level_offset[k + 1];
    for (std::uint32_t v = lo; v < hi; ++v) {
      t.first_child.push_back(static_cast<std::uint32_t>(t.parent.size()));
      br.clear();
      rule.expand(t.kind[v], br);
      for (const auto& b : br) {
        if (t.parent.size() + b.multiplicity > max_vertices)
          throw std::length_error("truncation to depth " + std::to_string(n) + " exceeds " +
                                  std::to_string(max_vertices) + " vertices");
        for (std::uint64_t m = 0; m < b.multiplicity; ++m) {
          t.parent.push_back(v);
          t.kind.push_back(b.kind);
        }
      }
    }
    t.level_offset.push_back(static_cast<std::uint32_t>(t.parent.size()));
  }
  while (t.first_child.size() <= t.parent.size())
    t.first_child.push_back(static_cast<std::uint32_t>(t.parent.size()));
  return t;
}

TreeTruncation truncate(const ChildSequence& seq, std::size_t n, std::size_t max_vertices) {
  return truncate(GeneralTree::spherical(seq), n, max_vertices);
}

}  // namespace percotree

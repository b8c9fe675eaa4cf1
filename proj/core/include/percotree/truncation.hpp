#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "percotree/general_tree.hpp"

namespace percotree {

struct Edge {
  std::uint32_t level;   // level of the child endpoint, 1..depth
  std::uint32_t parent;
  std::uint32_t child;
};

// Finite rooted tree to depth n. Vertices are numbered breadth first, so the
// children of v are [first_child[v], first_child[v+1]) and edge e joins
// parent[e+1] to e+1.
struct TreeTruncation {
  std::size_t depth = 0;
  std::vector<std::uint32_t> level_offset;  // size depth+2
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> first_child;   // size V+1
  std::vector<std::uint64_t> kind;          // rule kind per vertex
  std::shared_ptr<const TreeRule> rule;

  std::size_t vertex_count() const { return parent.size(); }
  std::size_t edge_count() const { return parent.empty() ? 0 : parent.size() - 1; }
  std::uint32_t level_of(std::uint32_t v) const;
  Edge edge(std::size_t e) const;
  std::size_t level_count(std::size_t k) const { return level_offset[k + 1] - level_offset[k]; }
  std::vector<std::uint64_t> path_of(std::uint32_t v) const;
  std::uint32_t vertex_at(const std::vector<std::uint64_t>& path) const;
  bool is_boundary(std::uint32_t v) const { return v >= level_offset[depth]; }
};

inline constexpr std::size_t kDefaultMaxVertices = std::size_t{1} << 23;

TreeTruncation truncate(const GeneralTree& tree, std::size_t n, std::size_t max_vertices = kDefaultMaxVertices);
TreeTruncation truncate(const ChildSequence& seq, std::size_t n, std::size_t max_vertices = kDefaultMaxVertices);

}  // namespace percotree

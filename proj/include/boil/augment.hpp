#pragma once

#include <span>
#include <utility>
#include <vector>

#include "boil/environment.hpp"
#include "boil/types.hpp"
#include "boil/visibility.hpp"

namespace boil {

/// A walk in the base graph exposed as a single macro edge.
struct PathEdge {
  EdgeId edge_id = 0;                // id of the macro edge in the augmented graph
  std::vector<NodeId> nodes;         // walk u0, u1, ..., uk
  std::vector<EdgeId> hops;          // base edge of each step
  double total_time = 0.0;           // T_path
  std::vector<std::pair<EdgeId, double>> time_shares;  // base edge -> accumulated T_e
};

struct AugmentedGraph {
  MovementGraph graph;  // base edges first, then one edge per path
  std::size_t base_edge_count = 0;
  std::vector<PathEdge> paths;
};

struct Augmentation {
  AugmentedGraph augmented;
  VisibilityMap vis;  // base rows followed by the path rows
};

/// Adds one macro edge per walk. Its visibility is the time-weighted average
/// of the edges it traverses. Throws NonContiguousPath.
Augmentation augment_with_paths(const MovementGraph& graph, const VisibilityMap& vis,
                                const std::vector<std::vector<NodeId>>& paths);

inline Augmentation augment_with_path(const MovementGraph& graph, const VisibilityMap& vis,
                                      std::span<const NodeId> path) {
  return augment_with_paths(graph, vis, {std::vector<NodeId>(path.begin(), path.end())});
}

/// Moves each macro edge's probability onto its base edges in proportion to
/// their share of the walk's time. Preserves the expected visibility.
EdgeDistribution back_project(const AugmentedGraph& augmented, const EdgeDistribution& p);

}  // namespace boil

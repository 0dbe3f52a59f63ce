#include "boil/augment.hpp"

#include <map>

#include "boil/errors.hpp"

namespace boil {

Augmentation augment_with_paths(const MovementGraph& graph, const VisibilityMap& vis,
                                const std::vector<std::vector<NodeId>>& paths) {
  if (vis.row_count() != graph.edge_count()) throw DimensionMismatch("map rows do not match graph edges");
  Augmentation out;
  out.vis = vis;
  out.augmented.base_edge_count = graph.edge_count();

  std::vector<Edge> extra;
  std::vector<double> times;
  for (const auto& nodes : paths) {
    if (nodes.size() < 2) throw NonContiguousPath("a path needs at least two nodes");
    PathEdge path;
    path.edge_id = static_cast<EdgeId>(graph.edge_count() + extra.size());
    path.nodes = nodes;
    times.clear();
    std::map<EdgeId, double> shares;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if (nodes[i] >= graph.node_count() || nodes[i + 1] >= graph.node_count()) {
        throw NonContiguousPath("path node out of range");
      }
      const auto e = graph.find_edge(nodes[i], nodes[i + 1]);
      if (!e) {
        throw NonContiguousPath("no edge " + std::to_string(nodes[i]) + " -> " + std::to_string(nodes[i + 1]));
      }
      const double t = graph.edge(*e).traversal_time;
      path.hops.push_back(*e);
      times.push_back(t);
      path.total_time += t;
      shares[*e] += t;
    }
    path.time_shares.assign(shares.begin(), shares.end());
    out.vis.append_row(path_visibility(vis, graph, path.hops, times));
    extra.push_back({nodes.front(), nodes.back(), path.total_time});
    out.augmented.paths.push_back(std::move(path));
  }
  out.augmented.graph = graph.with_extra_edges(extra);
  return out;
}

EdgeDistribution back_project(const AugmentedGraph& augmented, const EdgeDistribution& p) {
  if (p.size() != augmented.graph.edge_count()) throw DimensionMismatch("distribution does not match graph");
  EdgeDistribution base(std::vector<double>(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(augmented.base_edge_count)));
  for (const auto& path : augmented.paths) {
    const double mass = p[path.edge_id];
    for (const auto& [e, t] : path.time_shares) base[e] += t / path.total_time * mass;
  }
  return base;
}

}  // namespace boil

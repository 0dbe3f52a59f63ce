#include "boil/losses.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "boil/errors.hpp"

namespace boil {

std::vector<double> expected_visibility(const EdgeDistribution& p, const VisibilityMap& vis) {
  if (p.size() != vis.row_count()) {
    throw DimensionMismatch("edge distribution has " + std::to_string(p.size()) + " entries, map has " +
                            std::to_string(vis.row_count()) + " rows");
  }
  std::vector<double> a(vis.node_count(), 0.0);
  for (EdgeId e = 0; e < p.size(); ++e) {
    const double pe = p[e];
    if (pe == 0.0) continue;
    for (const auto& entry : vis.row(e)) a[entry.node] += pe * entry.value;
  }
  return a;
}

namespace {

double term(double a) { return a > 0.0 ? -a * std::log(a) : 0.0; }

}  // namespace

double entropy_surrogate(std::span<const double> a) {
  double total = 0.0;
  for (double v : a) total += term(v);
  return total;
}

double coverage_loss(const EdgeDistribution& p, const VisibilityMap& vis) {
  return entropy_surrogate(expected_visibility(p, vis));
}

double patrolling_loss(const EdgeDistribution& p, const VisibilityMap& vis, std::span<const NodeId> patrol_set) {
  if (patrol_set.empty()) throw EmptyPatrolSet();
  const auto a = expected_visibility(p, vis);
  double total = 0.0;
  for (NodeId w : patrol_set) {
    if (w >= a.size()) throw ValidationError("patrol node " + std::to_string(w) + " out of range");
    total += term(a[w]);
  }
  return total;
}

double reachability_loss(const EdgeDistribution& p, const VisibilityMap& reach) { return coverage_loss(p, reach); }

VisibilityMap build_reachability_map(const MovementGraph& graph, std::span<const double> horizon, double cutoff) {
  const std::size_t n = graph.node_count();
  if (horizon.size() != n) throw DimensionMismatch("horizon needs one value per node");

  // Shortest travel times from every node; Dijkstra degenerates to BFS when
  // every edge takes unit time, which is the common case.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<SparseEntry>> from(n);
  std::vector<double> dist(n);
  bool unit = true;
  for (const auto& e : graph.edges()) unit = unit && e.traversal_time == 1.0;
  for (NodeId v = 0; v < n; ++v) {
    std::fill(dist.begin(), dist.end(), inf);
    dist[v] = 0.0;
    std::deque<NodeId> queue{v};
    if (unit) {
      while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (EdgeId e : graph.out_edges(u)) {
          const NodeId w = graph.edge(e).dst;
          if (dist[w] == inf) {
            dist[w] = dist[u] + 1.0;
            queue.push_back(w);
          }
        }
      }
    } else {
      std::vector<bool> done(n, false);
      for (std::size_t round = 0; round < n; ++round) {
        NodeId best = 0;
        double best_d = inf;
        for (NodeId u = 0; u < n; ++u) {
          if (!done[u] && dist[u] < best_d) best_d = dist[best = u];
        }
        if (best_d == inf) break;
        done[best] = true;
        for (EdgeId e : graph.out_edges(best)) {
          const auto& edge = graph.edge(e);
          dist[edge.dst] = std::min(dist[edge.dst], best_d + edge.traversal_time);
        }
      }
    }
    for (NodeId w = 0; w < n; ++w) {
      if (dist[w] < inf) from[v].push_back({w, dist[w]});
    }
  }

  VisibilityMap reach(n);
  std::vector<SparseEntry> row;
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    row.clear();
    for (const auto& [w, d] : from[edge.dst]) {
      const double t = 0.5 * edge.traversal_time + d;
      const double r = 1.0 / (1.0 + std::exp(t - horizon[w]));
      if (r >= cutoff && r > 0.0) row.push_back({w, std::min(r, 1.0)});
    }
    reach.append_row(row);
  }
  return reach;
}

void LossSpec::validate(const MovementGraph& graph) const {
  if (map == nullptr) throw ConfigError("loss has no visibility map");
  if (map->row_count() != graph.edge_count()) throw DimensionMismatch("map rows do not match graph edges");
  if (kind == LossKind::Patrolling) {
    if (patrol_set.empty()) throw EmptyPatrolSet();
    for (NodeId w : patrol_set) {
      if (w >= map->node_count()) throw ValidationError("patrol node " + std::to_string(w) + " out of range");
    }
  }
}

double LossSpec::operator()(const EdgeDistribution& p) const {
  switch (kind) {
    case LossKind::Coverage:
      return coverage_loss(p, *map);
    case LossKind::Patrolling:
      return patrolling_loss(p, *map, patrol_set);
    case LossKind::Reachability:
      return reachability_loss(p, *map);
  }
  return 0.0;
}

}  // namespace boil

#pragma once

#include <span>
#include <vector>

#include "boil/environment.hpp"
#include "boil/types.hpp"
#include "boil/visibility.hpp"

namespace boil {

/// A(w) = sum_e P(e) V(e)(w).
std::vector<double> expected_visibility(const EdgeDistribution& p, const VisibilityMap& vis);

/// sum_w -A(w) ln A(w) with 0 ln 0 = 0.
double entropy_surrogate(std::span<const double> a);

double coverage_loss(const EdgeDistribution& p, const VisibilityMap& vis);
double patrolling_loss(const EdgeDistribution& p, const VisibilityMap& vis, std::span<const NodeId> patrol_set);
double reachability_loss(const EdgeDistribution& p, const VisibilityMap& reach);

/// R((u,v))(w) = 1 / (1 + exp(t - horizon(w))) where t is half the edge's
/// traversal time plus the shortest travel time from v to w. Entries below
/// `cutoff` are dropped.
VisibilityMap build_reachability_map(const MovementGraph& graph, std::span<const double> horizon,
                                     double cutoff = 1e-9);

enum class LossKind { Coverage, Patrolling, Reachability };

struct LossSpec {
  LossKind kind = LossKind::Coverage;
  /// Visibility map, or the reachability map R for Reachability.
  const VisibilityMap* map = nullptr;
  std::vector<NodeId> patrol_set;

  static LossSpec coverage(const VisibilityMap& vis) { return {LossKind::Coverage, &vis, {}}; }
  static LossSpec patrolling(const VisibilityMap& vis, std::vector<NodeId> nodes) {
    return {LossKind::Patrolling, &vis, std::move(nodes)};
  }
  static LossSpec reachability(const VisibilityMap& reach) { return {LossKind::Reachability, &reach, {}}; }

  /// Throws DimensionMismatch, EmptyPatrolSet or ValidationError.
  void validate(const MovementGraph& graph) const;

  double operator()(const EdgeDistribution& p) const;
};

}  // namespace boil

#pragma once

#include <optional>
#include <vector>

#include "boil/environment.hpp"
#include "boil/losses.hpp"
#include "boil/optimizer.hpp"
#include "boil/types.hpp"

namespace boil {

struct BoilResult {
  TransitionVector transitions;
  StationaryDist stationary;
  EdgeDistribution edges;
  double loss = 0.0;
  std::vector<double> loss_trace;  // iterate k = 0..N
  std::vector<bool> improved;      // iterate k set a new best
  std::size_t best_iteration = 0;
};

/// Learns a transition vector whose stationary edge distribution minimises
/// the loss. Starts from `p0`, or from uniform transitions. Edges with
/// non-unit traversal times are weighted by time in the edge distribution.
BoilResult boil_optimize(const MovementGraph& graph, const LossSpec& loss, const OptimizerConfig& config,
                         const std::optional<TransitionVector>& p0 = std::nullopt);

struct SplitConfig {
  double fraction = 0.5;  // p: share of time spent in the first phase
  /// Lambda per edge; empty means the constant 1.
  std::vector<double> penalty;
};

struct SplitResult {
  TransitionVector hat_transitions;
  TransitionVector bar_transitions;
  StationaryDist hat_stationary;
  StationaryDist bar_stationary;
  EdgeDistribution hat_edges;
  EdgeDistribution bar_edges;
  EdgeDistribution combined;  // p * hat + (1 - p) * bar
  /// The chain that draws its edges from `combined`: pi(u) is the mass leaving u.
  StationaryDist combined_stationary;
  TransitionVector combined_transitions;
  double loss = 0.0;          // penalised loss of the combination
  std::vector<double> loss_trace;
  std::vector<bool> improved;
  std::size_t best_iteration = 0;
};

/// L(p * hat + (1 - p) * bar) - 1/2 sum_e Lambda(e) (hat(e) - bar(e))^2.
double split_loss(const LossSpec& loss, const EdgeDistribution& hat, const EdgeDistribution& bar,
                  const SplitConfig& split);

/// Optimises two chains jointly, each balanced on its own.
SplitResult split_optimize(const MovementGraph& graph, const LossSpec& loss, const OptimizerConfig& config,
                           const SplitConfig& split);

}  // namespace boil

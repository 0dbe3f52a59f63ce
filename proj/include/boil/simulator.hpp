#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "boil/agents.hpp"
#include "boil/environment.hpp"
#include "boil/sampler.hpp"
#include "boil/types.hpp"
#include "boil/visibility.hpp"

namespace boil {

enum class VisibilityMode {
  Bernoulli,  // each fractional visibility value is realised as a coin flip
  Expected,   // counts accumulate probabilities instead
};

struct SimulationConfig {
  int n_agents = 1;
  int steps = 1;
  int runs = 1;
  std::uint64_t seed = 0;
  StrategyConfig strategy;
  /// Start nodes, one per agent; empty places agents uniformly at random.
  std::vector<NodeId> fixed_placement;
  VisibilityMode mode = VisibilityMode::Bernoulli;
  int jobs = 1;
};

void validate_simulation(const SimulationConfig& config, const MovementGraph& graph, bool has_target);

struct Trace {
  int n_agents = 0;
  int steps = 0;
  std::vector<NodeId> start_nodes;
  /// Edge taken by each agent at each step, step-major: [t * n_agents + i].
  std::vector<EdgeId> edge_sequence;
  std::vector<std::uint64_t> edge_counts;
  /// Steps in which each node was seen by at least one agent.
  std::vector<double> node_visibility_counts;
  /// [agent][node] steps in which that agent saw the node.
  std::vector<std::vector<double>> per_agent_visibility_counts;
  /// Per node, sum over steps of the number of agent pairs that both saw it.
  std::vector<double> pair_visibility_counts;
  /// Per node, sum over steps of the probability that some agent sees it
  /// given the edges taken, and the matching Bernoulli variance.
  std::vector<double> expected_visibility_counts;
  std::vector<double> visibility_variance;
  /// node_visibility_counts at each marker, in marker order.
  std::vector<double> marker_counts;

  bool operator==(const Trace&) const = default;
};

/// One trace per run. Runs are independent and may execute on `jobs`
/// threads; the result does not depend on the thread count.
std::vector<Trace> run_simulation(const MovementGraph& graph, const VisibilityMap& vis,
                                  const SimulationConfig& config, const TargetChain* target = nullptr,
                                  std::span<const NodeId> marker_nodes = {});

/// Edge counts over the first `steps` steps divided by n_agents * steps.
EdgeDistribution empirical_edge_distribution(const Trace& trace, int steps);
inline EdgeDistribution empirical_edge_distribution(const Trace& trace) {
  return empirical_edge_distribution(trace, trace.steps);
}

/// Marker cells of the grid that are open, as node ids.
std::vector<NodeId> marker_nodes(const GridSpec& grid, const MovementGraph& graph);

}  // namespace boil

#include "boil/simulator.hpp"

#include <atomic>
#include <optional>
#include <thread>

#include "boil/errors.hpp"
#include "boil/markov.hpp"

namespace boil {

void validate_simulation(const SimulationConfig& config, const MovementGraph& graph, bool has_target) {
  if (config.n_agents < 1) throw ConfigError("need at least one agent");
  if (config.steps < 1) throw ConfigError("need at least one step");
  if (config.runs < 1) throw ConfigError("need at least one run");
  if (config.jobs < 1) throw ConfigError("jobs must be positive");
  if (!config.fixed_placement.empty()) {
    if (config.fixed_placement.size() != static_cast<std::size_t>(config.n_agents)) {
      throw ConfigError("fixed placement needs one node per agent");
    }
    for (NodeId u : config.fixed_placement) {
      if (u >= graph.node_count()) throw ConfigError("placement node " + std::to_string(u) + " out of range");
    }
  }
  validate_strategy(config.strategy, has_target);
}

namespace {

struct AgentState {
  NodeId node = 0;
  Rng move{0};
  Rng sight{0};
  CountVector counts;
  std::optional<MHState> mh;
};

class Run {
 public:
  Run(const MovementGraph& graph, const VisibilityMap& vis, const SimulationConfig& config,
      const TargetChain* target, std::optional<EdgeSampler> sampler, std::span<const NodeId> markers)
      : graph_(graph), vis_(vis), config_(config), target_(target), sampler_(std::move(sampler)),
        markers_(markers) {}

  Trace execute(std::uint64_t run_index) {
    const std::size_t n = graph_.node_count();
    const int agents = config_.n_agents;
    const StrategyKind kind = config_.strategy.kind;
    const Rng run_rng = Rng(config_.seed).split(run_index);

    Trace trace;
    trace.n_agents = agents;
    trace.steps = config_.steps;
    trace.edge_sequence.reserve(static_cast<std::size_t>(agents) * static_cast<std::size_t>(config_.steps));
    trace.edge_counts.assign(graph_.edge_count(), 0);
    trace.node_visibility_counts.assign(n, 0.0);
    trace.per_agent_visibility_counts.assign(static_cast<std::size_t>(agents), std::vector<double>(n, 0.0));
    trace.pair_visibility_counts.assign(n, 0.0);
    trace.expected_visibility_counts.assign(n, 0.0);
    trace.visibility_variance.assign(n, 0.0);

    std::vector<AgentState> state(static_cast<std::size_t>(agents));
    for (int i = 0; i < agents; ++i) {
      auto& a = state[static_cast<std::size_t>(i)];
      a.move = run_rng.split(2 * static_cast<std::uint64_t>(i));
      a.sight = run_rng.split(2 * static_cast<std::uint64_t>(i) + 1);
      a.node = config_.fixed_placement.empty() ? static_cast<NodeId>(a.move.index(n))
                                               : config_.fixed_placement[static_cast<std::size_t>(i)];
      trace.start_nodes.push_back(a.node);
      if (!shares_counts(kind)) a.counts.assign(n, 0);
      if (kind == StrategyKind::Sample || kind == StrategyKind::CommSample) {
        a.mh = MHState{a.node, target_, a.move};
      }
    }
    CountVector shared(shares_counts(kind) ? n : 0, 0);
    const double scale = shares_counts(kind) ? static_cast<double>(agents) : 1.0;
    const double lambda = config_.strategy.lambda;

    std::vector<EdgeId> taken(static_cast<std::size_t>(agents));
    // Per node accumulators for the current step, reset through `touched`.
    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0), miss(n, 1.0);
    std::vector<char> seen(n, 0);
    std::vector<NodeId> touched;

    for (int t = 0; t < config_.steps; ++t) {
      for (int i = 0; i < agents; ++i) {
        auto& a = state[static_cast<std::size_t>(i)];
        EdgeId e = 0;
        switch (kind) {
          case StrategyKind::Random:
            e = random_step(a.node, graph_, a.move);
            break;
          case StrategyKind::OptRandom:
            e = static_cast<EdgeId>(a.move.index(graph_.edge_count()));
            break;
          case StrategyKind::Optimal:
            e = optimal_step(*sampler_, a.move);
            break;
          case StrategyKind::Frontier:
            e = frontier_step(a.node, graph_, vis_, a.counts, a.move, scale);
            break;
          case StrategyKind::CommFrontier:
            e = frontier_step(a.node, graph_, vis_, shared, a.move, scale);
            break;
          case StrategyKind::Sample:
          case StrategyKind::CommSample:
            e = sample_step(*a.mh, vis_, kind == StrategyKind::Sample ? a.counts : shared, lambda, scale);
            break;
        }
        a.node = graph_.edge(e).dst;
        if (a.mh) a.mh->current = a.node;
        taken[static_cast<std::size_t>(i)] = e;
        trace.edge_sequence.push_back(e);
        ++trace.edge_counts[e];

        auto& mine = trace.per_agent_visibility_counts[static_cast<std::size_t>(i)];
        for (const auto& s : vis_.row(e)) {
          double x = s.value;
          if (config_.mode == VisibilityMode::Bernoulli) x = a.sight.bernoulli(s.value) ? 1.0 : 0.0;
          if (!seen[s.node]) {
            seen[s.node] = 1;
            touched.push_back(s.node);
          }
          sum[s.node] += x;
          sum_sq[s.node] += x * x;
          miss[s.node] *= 1.0 - s.value;
          mine[s.node] += x;
        }
      }

      for (NodeId w : touched) {
        const double y = 1.0 - miss[w];
        trace.expected_visibility_counts[w] += y;
        trace.visibility_variance[w] += y * (1.0 - y);
        if (config_.mode == VisibilityMode::Bernoulli) {
          if (sum[w] > 0.0) trace.node_visibility_counts[w] += 1.0;
        } else {
          trace.node_visibility_counts[w] += y;
        }
        trace.pair_visibility_counts[w] += 0.5 * (sum[w] * sum[w] - sum_sq[w]);
        sum[w] = sum_sq[w] = 0.0;
        miss[w] = 1.0;
        seen[w] = 0;
      }
      touched.clear();

      // Counts from this step become visible to everyone at the next step.
      for (int i = 0; i < agents; ++i) {
        const EdgeId e = taken[static_cast<std::size_t>(i)];
        if (shares_counts(kind)) {
          record_visibility(e, vis_, shared);
        } else if (kind == StrategyKind::Frontier || kind == StrategyKind::Sample) {
          record_visibility(e, vis_, state[static_cast<std::size_t>(i)].counts);
        }
      }
    }

    for (NodeId m : markers_) trace.marker_counts.push_back(trace.node_visibility_counts[m]);
    return trace;
  }

 private:
  const MovementGraph& graph_;
  const VisibilityMap& vis_;
  const SimulationConfig& config_;
  const TargetChain* target_;
  std::optional<EdgeSampler> sampler_;
  std::span<const NodeId> markers_;
};

}  // namespace

std::vector<Trace> run_simulation(const MovementGraph& graph, const VisibilityMap& vis,
                                  const SimulationConfig& config, const TargetChain* target,
                                  std::span<const NodeId> marker_nodes) {
  validate_simulation(config, graph, target != nullptr);
  if (vis.row_count() != graph.edge_count()) throw DimensionMismatch("visibility rows do not match graph edges");
  if (target && target->graph->edge_count() != graph.edge_count()) {
    throw DimensionMismatch("distribution does not match graph");
  }
  for (NodeId m : marker_nodes) {
    if (m >= graph.node_count()) throw ValidationError("marker node out of range");
  }

  std::optional<EdgeSampler> sampler;
  if (config.strategy.kind == StrategyKind::Optimal) {
    sampler.emplace(occupancy_distribution(target->transitions, target->pi, graph));
  }

  std::vector<Trace> traces(static_cast<std::size_t>(config.runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < config.runs; r = next++) {
      Run run(graph, vis, config, target, sampler, marker_nodes);
      traces[static_cast<std::size_t>(r)] = run.execute(static_cast<std::uint64_t>(r));
    }
  };
  const int jobs = std::min(config.jobs, config.runs);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return traces;
}

EdgeDistribution empirical_edge_distribution(const Trace& trace, int steps) {
  EdgeDistribution p(trace.edge_counts.size());
  if (steps >= trace.steps) {
    const double total = static_cast<double>(trace.n_agents) * trace.steps;
    for (std::size_t e = 0; e < p.size(); ++e) p[e] = static_cast<double>(trace.edge_counts[e]) / total;
    return p;
  }
  if (steps < 1) throw ValidationError("prefix needs at least one step");
  const std::size_t len = static_cast<std::size_t>(steps) * static_cast<std::size_t>(trace.n_agents);
  for (std::size_t k = 0; k < len; ++k) p[trace.edge_sequence[k]] += 1.0;
  for (double& v : p) v /= static_cast<double>(len);
  return p;
}

std::vector<NodeId> marker_nodes(const GridSpec& grid, const MovementGraph& graph) {
  std::vector<NodeId> out;
  for (int cell : grid.markers) {
    if (const auto u = graph.node_of_cell(cell)) out.push_back(*u);
  }
  return out;
}

}  // namespace boil

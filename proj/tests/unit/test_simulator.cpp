#include <doctest.h>

#include <cmath>

#include "boil/errors.hpp"
#include "boil/markov.hpp"
#include "boil/metrics.hpp"
#include "boil/simulator.hpp"
#include "support.hpp"

using namespace boil;

namespace {

SimulationConfig config_of(StrategyKind kind, int agents, int steps, std::uint64_t seed = 1) {
  SimulationConfig c;
  c.n_agents = agents;
  c.steps = steps;
  c.seed = seed;
  c.strategy.kind = kind;
  return c;
}

// Open 4x4 grid with 0/1 visibility: every edge sees the cells it touches.
struct SmallWorld {
  GridSpec grid = testing::open_grid(4, 4);
  MovementGraph graph = build_movement_graph(grid);
  VisibilityMap vis;
  SmallWorld() {
    std::vector<std::vector<double>> rows(graph.edge_count(), std::vector<double>(graph.node_count(), 0.0));
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      rows[e][graph.edge(e).src] = 1.0;
      rows[e][graph.edge(e).dst] = 1.0;
    }
    vis = testing::make_vis(graph.node_count(), rows);
  }
};

}  // namespace

TEST_CASE("a lone agent on a single node") {
  const auto g = testing::make_graph(1, {{0, 0}});
  const auto vis = testing::make_vis(1, {{1.0}});
  const auto traces = run_simulation(g, vis, config_of(StrategyKind::Random, 1, 100));
  REQUIRE(traces.size() == 1);
  CHECK(traces[0].edge_counts == std::vector<std::uint64_t>{100});
  CHECK(traces[0].node_visibility_counts[0] == 100.0);
  CHECK(empirical_edge_distribution(traces[0])[0] == 1.0);
}

TEST_CASE("traces are deterministic and independent of the job count") {
  const SmallWorld w;
  auto c = config_of(StrategyKind::Frontier, 3, 200, 42);
  c.runs = 4;
  const auto once = run_simulation(w.graph, w.vis, c);
  const auto twice = run_simulation(w.graph, w.vis, c);
  c.jobs = 3;
  const auto threaded = run_simulation(w.graph, w.vis, c);
  CHECK(once == twice);
  CHECK(once == threaded);
  CHECK_FALSE(once[0] == once[1]);
}

TEST_CASE("trace bookkeeping replays from the edge sequence") {
  const SmallWorld w;
  const std::size_t n = w.graph.node_count();
  for (auto kind : {StrategyKind::Random, StrategyKind::Frontier, StrategyKind::CommFrontier, StrategyKind::OptRandom}) {
    const int agents = 3;
    const int steps = 300;
    const auto trace = run_simulation(w.graph, w.vis, config_of(kind, agents, steps, 5)).front();
    std::vector<std::uint64_t> edges(w.graph.edge_count(), 0);
    std::vector<double> seen(n, 0.0), pairs(n, 0.0);
    std::vector<std::vector<double>> mine(agents, std::vector<double>(n, 0.0));
    std::vector<NodeId> at = trace.start_nodes;
    for (int t = 0; t < steps; ++t) {
      std::vector<int> hits(n, 0);
      for (int i = 0; i < agents; ++i) {
        const EdgeId e = trace.edge_sequence[static_cast<std::size_t>(t * agents + i)];
        if (!teleports(kind)) CHECK(w.graph.edge(e).src == at[static_cast<std::size_t>(i)]);
        at[static_cast<std::size_t>(i)] = w.graph.edge(e).dst;
        ++edges[e];
        for (const auto& s : w.vis.row(e)) {
          ++hits[s.node];
          mine[static_cast<std::size_t>(i)][s.node] += 1.0;
        }
      }
      for (std::size_t v = 0; v < n; ++v) {
        if (hits[v] > 0) seen[v] += 1.0;
        pairs[v] += hits[v] * (hits[v] - 1) / 2.0;
      }
    }
    CHECK(edges == trace.edge_counts);
    CHECK(seen == trace.node_visibility_counts);
    CHECK(pairs == trace.pair_visibility_counts);
    CHECK(mine == trace.per_agent_visibility_counts);
    std::uint64_t total = 0;
    for (auto c : trace.edge_counts) total += c;
    CHECK(total == static_cast<std::uint64_t>(agents * steps));
    for (double v : trace.node_visibility_counts) CHECK(v <= steps);
    CHECK(std::abs(empirical_edge_distribution(trace).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("expected mode counts probabilities") {
  const auto g = testing::make_graph(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto vis = testing::make_vis(2, {{0.5, 0.0}, {0.5, 0.5}, {0.5, 0.5}, {0.0, 0.5}});
  auto c = config_of(StrategyKind::Random, 2, 50, 3);
  c.mode = VisibilityMode::Expected;
  const auto trace = run_simulation(g, vis, c).front();
  for (std::size_t w = 0; w < 2; ++w) {
    CHECK(trace.node_visibility_counts[w] == doctest::Approx(trace.expected_visibility_counts[w]).epsilon(1e-12));
  }
}

TEST_CASE("random walkers follow the uniform-walk stationary edges") {
  const auto grid = generate_reference_env(EnvKind::Small, 0);
  const auto g = build_movement_graph(grid);
  const auto vis = compute_visibility(grid, g, VisibilityParams{});
  const auto uniform = uniform_transitions(g);
  const auto target = edge_distribution(uniform, stationary_distribution(uniform, g), g);
  // At 1e4 steps even i.i.d. draws from the target sit near TV 0.1 on this many edges.
  const auto trace = run_simulation(g, vis, config_of(StrategyKind::Random, 8, 100000, 7)).front();
  CHECK(total_variation(empirical_edge_distribution(trace).values(), target.values()) < 0.1);
}

TEST_CASE("opt-random draws edges uniformly") {
  const SmallWorld w;
  const auto trace = run_simulation(w.graph, w.vis, config_of(StrategyKind::OptRandom, 1, 100000, 9)).front();
  const std::vector<double> uniform(w.graph.edge_count(), 1.0 / static_cast<double>(w.graph.edge_count()));
  CHECK(total_variation(empirical_edge_distribution(trace).values(), uniform) < 0.02);
}

TEST_CASE("sample and optimal agents use the target") {
  const SmallWorld w;
  Rng rng(4);
  const auto p = testing::random_transitions(w.graph, rng, 0.05);
  const TargetChain target(w.graph, stationary_distribution(p, w.graph), p);
  const auto goal = edge_distribution(p, target.pi, w.graph);
  for (auto kind : {StrategyKind::Sample, StrategyKind::CommSample}) {
    const auto trace = run_simulation(w.graph, w.vis, config_of(kind, 2, 500, 2), &target).front();
    NodeId a = trace.start_nodes[0];
    for (int t = 0; t < 500; ++t) {
      const EdgeId e = trace.edge_sequence[static_cast<std::size_t>(2 * t)];
      CHECK(w.graph.edge(e).src == a);
      a = w.graph.edge(e).dst;
    }
  }
  const auto optimal = run_simulation(w.graph, w.vis, config_of(StrategyKind::Optimal, 4, 25000, 2), &target).front();
  CHECK(total_variation(empirical_edge_distribution(optimal).values(), goal.values()) < 0.03);
}

TEST_CASE("prefix distributions and markers") {
  const SmallWorld w;
  auto c = config_of(StrategyKind::Random, 2, 10, 8);
  c.fixed_placement = {0, 15};
  const std::vector<NodeId> markers{5, 0};
  const auto trace = run_simulation(w.graph, w.vis, c, nullptr, markers).front();
  CHECK(trace.start_nodes == std::vector<NodeId>{0, 15});
  CHECK(trace.marker_counts == std::vector<double>{trace.node_visibility_counts[5], trace.node_visibility_counts[0]});
  const auto first = empirical_edge_distribution(trace, 1);
  CHECK(first[trace.edge_sequence[0]] + first[trace.edge_sequence[1]] == doctest::Approx(1.0));
  CHECK(empirical_edge_distribution(trace, 10) == empirical_edge_distribution(trace));
}

TEST_CASE("simulation configuration is validated") {
  const SmallWorld w;
  auto c = config_of(StrategyKind::Random, 2, 10);
  c.fixed_placement = {0};
  CHECK_THROWS_AS(run_simulation(w.graph, w.vis, c), ConfigError);
  c.fixed_placement = {0, 99};
  CHECK_THROWS_AS(run_simulation(w.graph, w.vis, c), ConfigError);
  CHECK_THROWS_AS(run_simulation(w.graph, w.vis, config_of(StrategyKind::Sample, 1, 10)), ConfigError);
  CHECK_THROWS_AS(run_simulation(w.graph, w.vis, config_of(StrategyKind::Random, 0, 10)), ConfigError);
  CHECK_THROWS_AS(run_simulation(w.graph, w.vis, config_of(StrategyKind::Random, 1, 0)), ConfigError);
  const std::vector<NodeId> bad_marker{99};
  CHECK_THROWS_AS(run_simulation(w.graph, w.vis, config_of(StrategyKind::Random, 1, 5), nullptr, bad_marker),
                  ValidationError);
}

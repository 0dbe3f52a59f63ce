#include <doctest.h>

#include <cmath>
#include <fstream>

#include "boil/errors.hpp"
#include "boil/io.hpp"
#include "boil/markov.hpp"
#include "support.hpp"

using namespace boil;

namespace {

DistributionFile random_dist(const MovementGraph& g, Rng& rng) {
  DistributionFile d;
  d.transitions = testing::random_transitions(g, rng, 0.01);
  d.stationary = stationary_distribution(d.transitions, g);
  d.edges = edge_distribution(d.transitions, d.stationary, g);
  d.loss = 1.0 / 3.0;
  d.iterations = 1234;
  d.seed = 99;
  d.env_hash = 0xfeedfacecafebeefULL;
  return d;
}

}  // namespace

TEST_CASE("distribution files round-trip exactly") {
  Rng rng(1);
  const auto g = testing::random_strong_graph(15, 20, rng);
  const auto d = random_dist(g, rng);
  const auto text = distribution_to_json(d, g);
  const auto back = distribution_from_json(text, g);
  CHECK(back.transitions == d.transitions);
  CHECK(back.stationary == d.stationary);
  CHECK(back.edges == d.edges);
  CHECK(back.loss == d.loss);
  CHECK(back.iterations == d.iterations);
  CHECK(back.seed == d.seed);
  CHECK(back.env_hash == d.env_hash);
  CHECK(distribution_to_json(back, g) == text);

  const auto dir = testing::scratch_dir("io-dist");
  save_distribution(d, g, dir / "d.json");
  CHECK(load_distribution(dir / "d.json", g).edges == d.edges);
}

TEST_CASE("distribution files are checked against the graph") {
  Rng rng(2);
  const auto g = testing::random_strong_graph(6, 4, rng);
  const auto text = distribution_to_json(random_dist(g, rng), g);
  const auto other = testing::random_strong_graph(6, 9, rng);
  CHECK_THROWS_AS(distribution_from_json(text, other), ValidationError);
  auto wrong_version = text;
  wrong_version.replace(wrong_version.find("dist/1"), 6, "dist/9");
  CHECK_THROWS_AS(distribution_from_json(wrong_version, g), ValidationError);
  CHECK_THROWS(distribution_from_json("{\"version\": ", g));
}

TEST_CASE("simulation configs round-trip") {
  SimulationConfig c;
  c.n_agents = 8;
  c.steps = 100000;
  c.runs = 10;
  c.seed = 77;
  c.strategy.kind = StrategyKind::CommSample;
  c.strategy.lambda = 2.5;
  c.mode = VisibilityMode::Expected;
  c.jobs = 3;
  const auto back = simulation_config_from_json(simulation_config_to_json(c));
  CHECK(back.n_agents == 8);
  CHECK(back.steps == 100000);
  CHECK(back.runs == 10);
  CHECK(back.seed == 77);
  CHECK(back.strategy.kind == StrategyKind::CommSample);
  CHECK(back.strategy.lambda == 2.5);
  CHECK(back.mode == VisibilityMode::Expected);
  CHECK(back.jobs == 3);
  CHECK(back.fixed_placement.empty());

  c.fixed_placement = {3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(simulation_config_from_json(simulation_config_to_json(c)).fixed_placement == c.fixed_placement);
  CHECK_THROWS_AS(simulation_config_from_json("{\"version\": \"sim/2\"}"), ValidationError);
}

TEST_CASE("traces survive the csv files") {
  const auto grid = generate_walled_env(9, 9, 4);
  const auto g = build_movement_graph(grid);
  const auto vis = compute_visibility(grid, g, VisibilityParams{});
  SimulationConfig c;
  c.n_agents = 3;
  c.steps = 200;
  c.seed = 5;
  const auto trace = run_simulation(g, vis, c).front();
  const auto dir = testing::scratch_dir("io-trace");
  write_trace_csv(dir / "steps.csv", trace, g);
  write_node_summary_csv(dir / "nodes.csv", trace);
  const auto back = read_trace(dir / "steps.csv", dir / "nodes.csv", g);
  CHECK(back.n_agents == trace.n_agents);
  CHECK(back.steps == trace.steps);
  CHECK(back.start_nodes == trace.start_nodes);
  CHECK(back.edge_sequence == trace.edge_sequence);
  CHECK(back.edge_counts == trace.edge_counts);
  CHECK(back.node_visibility_counts == trace.node_visibility_counts);
  CHECK(back.expected_visibility_counts == trace.expected_visibility_counts);
  CHECK(back.visibility_variance == trace.visibility_variance);
  CHECK(back.pair_visibility_counts == trace.pair_visibility_counts);
  CHECK(back.per_agent_visibility_counts == trace.per_agent_visibility_counts);

  // Step rows name cells, so the first row starts at the first agent's cell.
  std::ifstream steps(dir / "steps.csv");
  std::string header, row;
  std::getline(steps, header);
  std::getline(steps, row);
  CHECK(row.rfind("0,0," + std::to_string(g.cell_of(trace.start_nodes[0])) + ",", 0) == 0);

  write_text(dir / "bad.csv", "step,agent,edge_src,edge_dst\n0,0,0,80\n");
  CHECK_THROWS_AS(read_trace(dir / "bad.csv", dir / "nodes.csv", g), ValidationError);
}

TEST_CASE("doubles print so they read back") {
  Rng rng(7);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(rng.uniform(), static_cast<int>(rng.index(80)) - 40);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("loss traces and marker files") {
  const auto dir = testing::scratch_dir("io-misc");
  write_loss_trace_csv(dir / "loss.csv", {2.0, 1.5, 1.75}, {true, true, false});
  const auto text = read_text(dir / "loss.csv");
  CHECK(text.find("1.75") != std::string::npos);
  Trace t;
  t.marker_counts = {4.0, 0.0};
  write_marker_csv(dir / "markers.csv", t);
  CHECK(read_text(dir / "markers.csv") == "marker,count\n0,4\n1,0\n");
  CHECK_THROWS_AS(read_text(dir / "missing.csv"), ValidationError);
}

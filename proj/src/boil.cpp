#include "boil/boil.hpp"

#include <cmath>

#include "boil/errors.hpp"
#include "boil/markov.hpp"

namespace boil {

namespace {

StationaryOptions stationary_options(const OptimizerConfig& config) {
  StationaryOptions opts;
  opts.tol = config.stationary_tol;
  opts.max_iters = config.stationary_max_iters;
  return opts;
}

void check_start(const TransitionVector& p, const MovementGraph& graph) {
  if (p.size() != graph.edge_count()) throw DimensionMismatch("initial transitions have wrong length");
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError("initial transitions must be nonnegative");
  }
  if (row_sum_error(p, graph) > 1e-9) throw ValidationError("initial transitions are not row-stochastic");
}

}  // namespace

BoilResult boil_optimize(const MovementGraph& graph, const LossSpec& loss, const OptimizerConfig& config,
                         const std::optional<TransitionVector>& p0) {
  validate_config(config);
  loss.validate(graph);
  TransitionVector start = p0 ? *p0 : uniform_transitions(graph);
  check_start(start, graph);

  const auto blocks = SimplexBlocks::from_graph(graph);
  TransitionVector p(graph.edge_count());
  StationarySolver solver(graph, stationary_options(config));
  auto evaluate = [&](std::span<const double> x, std::span<const double>) {
    p.values().assign(x.begin(), x.end());
    auto solved = solver.solve(p);
    const double value = loss(occupancy_distribution(p, solved.pi, graph));
    return Evaluation{value, std::move(solved.pi.values())};
  };
  auto run = minimize_zeroth_order(start.values(), blocks, config, evaluate);

  BoilResult result;
  result.transitions = TransitionVector(std::move(run.best_x));
  result.stationary = StationaryDist(std::move(run.best_state));
  result.edges = occupancy_distribution(result.transitions, result.stationary, graph);
  result.loss = run.best_loss;
  result.loss_trace = std::move(run.loss_trace);
  result.improved = std::move(run.improved);
  result.best_iteration = run.best_iteration;
  return result;
}

double split_loss(const LossSpec& loss, const EdgeDistribution& hat, const EdgeDistribution& bar,
                  const SplitConfig& split) {
  if (hat.size() != bar.size()) throw DimensionMismatch("split components differ in length");
  if (!split.penalty.empty() && split.penalty.size() != hat.size()) {
    throw DimensionMismatch("penalty needs one value per edge");
  }
  EdgeDistribution combined(hat.size());
  double penalty = 0.0;
  for (std::size_t e = 0; e < hat.size(); ++e) {
    combined[e] = split.fraction * hat[e] + (1.0 - split.fraction) * bar[e];
    const double d = hat[e] - bar[e];
    penalty += (split.penalty.empty() ? 1.0 : split.penalty[e]) * d * d;
  }
  return loss(combined) - 0.5 * penalty;
}

SplitResult split_optimize(const MovementGraph& graph, const LossSpec& loss, const OptimizerConfig& config,
                           const SplitConfig& split) {
  validate_config(config);
  loss.validate(graph);
  if (!(split.fraction > 0.0 && split.fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
  if (!split.penalty.empty() && split.penalty.size() != graph.edge_count()) {
    throw ConfigError("penalty needs one value per edge");
  }
  for (double v : split.penalty) {
    if (!(v >= 0.0)) throw ConfigError("penalty must be nonnegative");
  }

  const std::size_t m = graph.edge_count();
  const std::size_t n = graph.node_count();
  auto blocks = SimplexBlocks::from_graph(graph);
  blocks.append(SimplexBlocks::from_graph(graph), m);

  const auto uniform = uniform_transitions(graph);
  std::vector<double> x0(uniform.begin(), uniform.end());
  x0.insert(x0.end(), uniform.begin(), uniform.end());

  TransitionVector hat(m);
  TransitionVector bar(m);
  StationarySolver hat_solver(graph, stationary_options(config));
  StationarySolver bar_solver(graph, stationary_options(config));
  auto evaluate = [&](std::span<const double> x, std::span<const double>) {
    hat.values().assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m));
    bar.values().assign(x.begin() + static_cast<std::ptrdiff_t>(m), x.end());
    auto hat_pi = hat_solver.solve(hat);
    auto bar_pi = bar_solver.solve(bar);
    const double value = split_loss(loss, occupancy_distribution(hat, hat_pi.pi, graph),
                                    occupancy_distribution(bar, bar_pi.pi, graph), split);
    std::vector<double> state = std::move(hat_pi.pi.values());
    state.insert(state.end(), bar_pi.pi.begin(), bar_pi.pi.end());
    return Evaluation{value, std::move(state)};
  };
  auto run = minimize_zeroth_order(std::move(x0), blocks, config, evaluate);

  SplitResult result;
  result.hat_transitions = TransitionVector({run.best_x.begin(), run.best_x.begin() + static_cast<std::ptrdiff_t>(m)});
  result.bar_transitions = TransitionVector({run.best_x.begin() + static_cast<std::ptrdiff_t>(m), run.best_x.end()});
  result.hat_stationary =
      StationaryDist({run.best_state.begin(), run.best_state.begin() + static_cast<std::ptrdiff_t>(n)});
  result.bar_stationary =
      StationaryDist({run.best_state.begin() + static_cast<std::ptrdiff_t>(n), run.best_state.end()});
  result.hat_edges = occupancy_distribution(result.hat_transitions, result.hat_stationary, graph);
  result.bar_edges = occupancy_distribution(result.bar_transitions, result.bar_stationary, graph);
  result.combined = EdgeDistribution(m);
  for (std::size_t e = 0; e < m; ++e) {
    result.combined[e] = split.fraction * result.hat_edges[e] + (1.0 - split.fraction) * result.bar_edges[e];
  }
  // A node without mass in either phase keeps the mixed rows of the two chains.
  result.combined_stationary = StationaryDist(n);
  result.combined_transitions = TransitionVector(m);
  for (NodeId u = 0; u < n; ++u) {
    const auto out = graph.out_edges(u);
    double mass = 0.0;
    for (EdgeId e : out) mass += result.combined[e];
    result.combined_stationary[u] = mass;
    for (EdgeId e : out) {
      result.combined_transitions[e] =
          mass > 0.0 ? result.combined[e] / mass
                     : split.fraction * result.hat_transitions[e] + (1.0 - split.fraction) * result.bar_transitions[e];
    }
  }
  result.loss = run.best_loss;
  result.loss_trace = std::move(run.loss_trace);
  result.improved = std::move(run.improved);
  result.best_iteration = run.best_iteration;
  return result;
}

}  // namespace boil

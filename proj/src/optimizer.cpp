#include "boil/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boil/errors.hpp"

namespace boil {

void validate_config(const OptimizerConfig& config) {
  if (!(config.step_size > 0.0)) throw ConfigError("step size must be positive");
  if (config.num_steps < 1) throw ConfigError("number of steps must be at least 1");
  if (!(config.perturbation_radius > 0.0)) throw ConfigError("perturbation radius must be positive");
  if (!(config.floor > 0.0) || config.floor >= 0.5) throw ConfigError("floor must lie in (0, 0.5)");
  if (!(config.stationary_tol > 0.0)) throw ConfigError("stationary tolerance must be positive");
}

SimplexBlocks SimplexBlocks::from_graph(const MovementGraph& graph) {
  SimplexBlocks blocks;
  std::vector<std::size_t> coords;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto out = graph.out_edges(u);
    coords.assign(out.begin(), out.end());
    blocks.add_block(coords);
  }
  return blocks;
}

void SimplexBlocks::add_block(std::span<const std::size_t> coords) {
  coords_.insert(coords_.end(), coords.begin(), coords.end());
  offsets_.push_back(coords_.size());
}

void SimplexBlocks::append(const SimplexBlocks& other, std::size_t shift) {
  for (std::size_t b = 0; b < other.block_count(); ++b) {
    for (std::size_t c : other.block(b)) coords_.push_back(c + shift);
    offsets_.push_back(coords_.size());
  }
}

bool SimplexBlocks::has_freedom() const {
  for (std::size_t b = 0; b < block_count(); ++b) {
    if (block(b).size() > 1) return true;
  }
  return false;
}

void project_to_simplices(std::span<double> x, const SimplexBlocks& blocks, double floor) {
  for (std::size_t b = 0; b < blocks.block_count(); ++b) {
    double total = 0.0;
    for (std::size_t c : blocks.block(b)) total += (x[c] = std::max(x[c], floor));
    for (std::size_t c : blocks.block(b)) x[c] /= total;
  }
}

std::vector<double> sphere_direction(std::size_t dimension, double radius, Rng& rng) {
  std::vector<double> r(dimension);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : r) {
      v = rng.normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double scale = radius / std::sqrt(norm2);
  for (double& v : r) v *= scale;
  return r;
}

std::vector<double> perturb(std::span<const double> x, std::span<const double> r, const SimplexBlocks& blocks,
                            double floor) {
  std::vector<double> q(x.begin(), x.end());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += r[i];
  project_to_simplices(q, blocks, floor);
  return q;
}

std::vector<double> estimate_gradient(std::span<const double> x, double loss_at_x, const SimplexBlocks& blocks,
                                      const OptimizerConfig& config, Rng& rng,
                                      const std::function<double(std::span<const double>)>& loss) {
  auto r = sphere_direction(x.size(), config.perturbation_radius, rng);
  const auto q = perturb(x, r, blocks, config.floor);
  const double tau2 = config.perturbation_radius * config.perturbation_radius;
  const double scale = static_cast<double>(x.size()) * (loss(q) - loss_at_x) / tau2;
  for (double& v : r) v *= scale;
  return r;
}

namespace {

void require_finite(double loss, std::size_t iteration, const char* what) {
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite loss " << loss << " at iteration " << iteration << " (" << what << ")";
    throw NonFiniteLoss(msg.str());
  }
}

}  // namespace

ZerothOrderResult minimize_zeroth_order(std::vector<double> x0, const SimplexBlocks& blocks,
                                        const OptimizerConfig& config, const Evaluator& evaluate) {
  validate_config(config);
  if (x0.size() != blocks.dimension()) throw DimensionMismatch("starting point has wrong dimension");

  ZerothOrderResult result;
  Evaluation current = evaluate(x0, {});
  require_finite(current.loss, 0, "initial point");
  result.loss_trace.push_back(current.loss);
  result.improved.push_back(true);
  result.best_x = x0;
  result.best_state = current.state;
  result.best_loss = current.loss;
  if (!blocks.has_freedom()) return result;

  Rng rng(config.seed);
  const double m = static_cast<double>(x0.size());
  const double tau2 = config.perturbation_radius * config.perturbation_radius;
  std::vector<double> x = std::move(x0);
  std::vector<double> warm;
  for (int k = 0; k < config.num_steps; ++k) {
    const auto r = sphere_direction(x.size(), config.perturbation_radius, rng);
    const auto q = perturb(x, r, blocks, config.floor);
    const Evaluation probe = evaluate(q, current.state);
    require_finite(probe.loss, static_cast<std::size_t>(k), "perturbed point");

    const double coef = m * (probe.loss - current.loss) / tau2;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= config.step_size * coef * r[i];
    project_to_simplices(x, blocks, config.floor);

    // The update moves along -r while the probe moved along +r, so the
    // stationary state is extrapolated linearly as a warm start.
    const double along = -config.step_size * coef;
    warm.assign(current.state.size(), 0.0);
    for (std::size_t i = 0; i < warm.size(); ++i) {
      warm[i] = std::max(0.0, current.state[i] + along * (probe.state[i] - current.state[i]));
    }
    current = evaluate(x, warm);
    require_finite(current.loss, static_cast<std::size_t>(k + 1), "iterate");

    const bool better = current.loss < result.best_loss;
    result.loss_trace.push_back(current.loss);
    result.improved.push_back(better);
    if (better) {
      result.best_loss = current.loss;
      result.best_x = x;
      result.best_state = current.state;
      result.best_iteration = static_cast<std::size_t>(k + 1);
    }
  }
  return result;
}

}  // namespace boil

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "boil/environment.hpp"
#include "boil/rng.hpp"

namespace boil {

struct OptimizerConfig {
  double step_size = 0.1;             // mu
  int num_steps = 5000;               // N
  double perturbation_radius = 0.05;  // tau; 1 gives the unit-sphere probe
  double floor = 1e-9;                // epsilon used by the simplex projection
  std::uint64_t seed = 0;
  double stationary_tol = 1e-10;
  int stationary_max_iters = 100000;
};

void validate_config(const OptimizerConfig& config);

/// Groups of coordinates that each live on a probability simplex, e.g. the
/// outgoing edges of every node.
class SimplexBlocks {
 public:
  SimplexBlocks() = default;
  static SimplexBlocks from_graph(const MovementGraph& graph);

  void add_block(std::span<const std::size_t> coords);
  /// Appends `other` with all its coordinates shifted by `shift`.
  void append(const SimplexBlocks& other, std::size_t shift);

  std::size_t block_count() const { return offsets_.size() - 1; }
  std::span<const std::size_t> block(std::size_t b) const {
    return {coords_.data() + offsets_[b], offsets_[b + 1] - offsets_[b]};
  }
  std::size_t dimension() const { return coords_.size(); }
  /// True when some block has more than one coordinate.
  bool has_freedom() const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> coords_;
};

/// Clamps entries below `floor` up to it, then renormalises every block.
void project_to_simplices(std::span<double> x, const SimplexBlocks& blocks, double floor);

/// Uniform direction on the sphere of the given radius.
std::vector<double> sphere_direction(std::size_t dimension, double radius, Rng& rng);

/// q = project(x + r).
std::vector<double> perturb(std::span<const double> x, std::span<const double> r,
                            const SimplexBlocks& blocks, double floor);

/// One two-point estimate g = m (L(project(x + r)) - L(x)) r / tau^2 with r
/// drawn on the sphere of radius tau.
std::vector<double> estimate_gradient(std::span<const double> x, double loss_at_x,
                                      const SimplexBlocks& blocks, const OptimizerConfig& config, Rng& rng,
                                      const std::function<double(std::span<const double>)>& loss);

struct Evaluation {
  double loss = 0.0;
  /// Auxiliary state carried between evaluations (stationary vectors); used
  /// to warm-start the next evaluation.
  std::vector<double> state;
};

/// Evaluates a point. `warm` is a state from a nearby point, possibly empty.
using Evaluator = std::function<Evaluation(std::span<const double> x, std::span<const double> warm)>;

struct ZerothOrderResult {
  std::vector<double> best_x;
  std::vector<double> best_state;
  double best_loss = 0.0;
  std::size_t best_iteration = 0;
  std::vector<double> loss_trace;  // loss of iterate k for k = 0..N
  std::vector<bool> improved;      // iterate k became the running best
};

/// Random-direction descent over a product of simplices. Returns the best
/// recorded iterate, including the starting point.
ZerothOrderResult minimize_zeroth_order(std::vector<double> x0, const SimplexBlocks& blocks,
                                        const OptimizerConfig& config, const Evaluator& evaluate);

}  // namespace boil

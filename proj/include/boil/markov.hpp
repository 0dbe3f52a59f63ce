#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "boil/environment.hpp"
#include "boil/types.hpp"

namespace boil {

struct StationaryOptions {
  double tol = 1e-10;
  int max_iters = 100000;
  /// Teleport mass spread uniformly over nodes; 0 keeps the chain's own flow.
  double damping = 0.0;
  /// Initial vector; empty means uniform.
  std::span<const double> start = {};
};

struct StationaryResult {
  StationaryDist pi;
  int iterations = 0;
  double residual = 0.0;
};

/// Power iteration on the relaxed kernel (1-w) I + w P with w = 0.9. The
/// relaxation has the same fixed point and removes periodic oscillation.
/// Stops once sum_v |sum_u pi(u) P(u->v) - pi(v)| <= tol, which bounds the
/// reported max-norm residual as well; throws NotConverged.
StationaryResult solve_stationary(const TransitionVector& p, const MovementGraph& graph,
                                  const StationaryOptions& options = {});

inline StationaryDist stationary_distribution(const TransitionVector& p, const MovementGraph& graph,
                                              const StationaryOptions& options = {}) {
  return solve_stationary(p, graph, options).pi;
}

/// Solves the balance equations by sparse LU with the equation of the
/// heaviest node replaced by pi(u) = 1, reusing one symbolic factorisation for
/// every transition vector on the same graph. Nearly decomposable chains fall
/// back to the normalisation sum(pi) = 1 in place of that equation. Results are
/// held to the same residual bound; power iteration takes over when it is missed.
class StationarySolver {
 public:
  explicit StationarySolver(const MovementGraph& graph, StationaryOptions options = {});
  ~StationarySolver();
  StationarySolver(StationarySolver&&) noexcept;
  StationarySolver& operator=(StationarySolver&&) noexcept;

  StationaryResult solve(const TransitionVector& p);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// max_v |sum_u pi(u) P(u->v) - pi(v)|.
double global_balance_residual(const TransitionVector& p, const StationaryDist& pi,
                               const MovementGraph& graph);

TransitionVector uniform_transitions(const MovementGraph& graph);

/// Largest |sum_v P(u->v) - 1| over nodes.
double row_sum_error(const TransitionVector& p, const MovementGraph& graph);

/// P((u,v)) = pi(u) P(u->v).
EdgeDistribution edge_distribution(const TransitionVector& p, const StationaryDist& pi,
                                   const MovementGraph& graph);

/// Fraction of time spent on each edge: pi(u) P(u->v) T(u,v), normalised.
/// Equal to edge_distribution when every traversal time is 1.
EdgeDistribution occupancy_distribution(const TransitionVector& p, const StationaryDist& pi,
                                        const MovementGraph& graph);

/// Inverse of edge_distribution: pi(u) = sum_v P((u,v)), P(u->v) = P((u,v)) / pi(u).
/// The result is not checked for global balance. Throws ZeroMassNode.
std::pair<StationaryDist, TransitionVector> decompose_edge_distribution(const EdgeDistribution& edges,
                                                                        const MovementGraph& graph);

/// Antisymmetric net flux Gamma(u,v) = pi(u)P(u->v) - pi(v)P(v->u), stored per
/// edge. A missing reverse edge contributes probability zero.
class VorticityMatrix {
 public:
  VorticityMatrix() = default;
  VorticityMatrix(const MovementGraph* graph, std::vector<double> per_edge)
      : graph_(graph), per_edge_(std::move(per_edge)) {}

  double operator()(NodeId u, NodeId v) const;
  double on_edge(EdgeId e) const { return per_edge_[e]; }
  std::span<const double> per_edge() const { return per_edge_; }

 private:
  const MovementGraph* graph_ = nullptr;
  std::vector<double> per_edge_;
};

VorticityMatrix vorticity(const TransitionVector& p, const StationaryDist& pi, const MovementGraph& graph);

struct VorticityViolation {
  NodeId u;
  NodeId v;
  double gamma;
  double lower;   // -pi(v) Q(v,u)
  double upper;   // pi(u) Q(u,v)
  double margin;  // distance outside [lower, upper]
};

/// Every ordered pair breaking -pi(v)Q(v,u) <= Gamma(u,v) <= pi(u)Q(u,v).
/// `proposal` holds Q per edge in the same layout as a TransitionVector.
std::vector<VorticityViolation> check_vorticity_constraint(const VorticityMatrix& gamma,
                                                           const StationaryDist& pi,
                                                           const TransitionVector& proposal,
                                                           const MovementGraph& graph,
                                                           double tolerance = 1e-15);

}  // namespace boil

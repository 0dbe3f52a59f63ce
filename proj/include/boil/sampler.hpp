#pragma once

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "boil/environment.hpp"
#include "boil/markov.hpp"
#include "boil/rng.hpp"
#include "boil/types.hpp"

namespace boil {

/// Proposal probabilities over the outgoing edges of a node, in out_edges
/// order. Must be strictly positive and sum to one.
using ProposalKernel = std::function<void(NodeId u, std::vector<double>& probs)>;

/// Proposal proportional to the target transitions.
ProposalKernel target_proposal(const MovementGraph& graph, const TransitionVector& p);
ProposalKernel uniform_proposal(const MovementGraph& graph);

/// Target chain shared read-only by every sampling agent.
struct TargetChain {
  const MovementGraph* graph = nullptr;
  StationaryDist pi;
  TransitionVector transitions;
  VorticityMatrix gamma;

  TargetChain(const MovementGraph& g, StationaryDist stationary, TransitionVector p);
  TargetChain(const TargetChain&) = delete;
  TargetChain& operator=(const TargetChain&) = delete;
};

struct MHState {
  NodeId current = 0;
  const TargetChain* target = nullptr;
  Rng rng{0};
};

/// Probability of proposing edge (u,v) from u; zero when the edge is absent.
double proposal_probability(const MovementGraph& graph, const ProposalKernel& q, NodeId u, NodeId v,
                            std::vector<double>& scratch);

/// Non-reversible Hastings ratio with Gamma clipped into
/// [-pi(v)Q(v,u), pi(u)Q(u,v)]; 1 when pi(u)Q(u,v) = 0.
double hastings_ratio(NodeId u, NodeId v, const TargetChain& target, const ProposalKernel& q);

/// Proposes an edge from Q and accepts it with probability min(1, R).
/// Returns the traversed edge: the proposal, or the self-loop on rejection.
EdgeId mh_step(MHState& state, const ProposalKernel& q);

/// Categorical sampler over all edges; teleporting is allowed.
class EdgeSampler {
 public:
  explicit EdgeSampler(const EdgeDistribution& p) : dist_(p.begin(), p.end()) {}
  EdgeId operator()(Rng& rng) { return static_cast<EdgeId>(dist_(rng.engine())); }

 private:
  std::discrete_distribution<std::size_t> dist_;
};

inline EdgeId sample_edge_unconstrained(const EdgeDistribution& p, Rng& rng) { return EdgeSampler(p)(rng); }

}  // namespace boil

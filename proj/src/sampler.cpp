#include "boil/sampler.hpp"

#include <algorithm>

#include "boil/errors.hpp"

namespace boil {

ProposalKernel target_proposal(const MovementGraph& graph, const TransitionVector& p) {
  return [&graph, &p](NodeId u, std::vector<double>& probs) {
    const auto out = graph.out_edges(u);
    probs.resize(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) probs[i] = p[out[i]];
  };
}

ProposalKernel uniform_proposal(const MovementGraph& graph) {
  return [&graph](NodeId u, std::vector<double>& probs) {
    const auto out = graph.out_edges(u);
    probs.assign(out.size(), 1.0 / static_cast<double>(out.size()));
  };
}

TargetChain::TargetChain(const MovementGraph& g, StationaryDist stationary, TransitionVector p)
    : graph(&g), pi(std::move(stationary)), transitions(std::move(p)) {
  if (pi.size() != g.node_count() || transitions.size() != g.edge_count()) {
    throw DimensionMismatch("target chain does not match graph");
  }
  gamma = vorticity(transitions, pi, g);
}

double proposal_probability(const MovementGraph& graph, const ProposalKernel& q, NodeId u, NodeId v,
                            std::vector<double>& scratch) {
  const auto out = graph.out_edges(u);
  q(u, scratch);
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (graph.edge(out[i]).dst == v) total += scratch[i];
  }
  return total;
}

double hastings_ratio(NodeId u, NodeId v, const TargetChain& target, const ProposalKernel& q) {
  const auto& graph = *target.graph;
  std::vector<double> scratch;
  const double forward = target.pi[u] * proposal_probability(graph, q, u, v, scratch);
  if (forward == 0.0) return 1.0;
  const double backward = target.pi[v] * proposal_probability(graph, q, v, u, scratch);
  const double gamma = std::clamp(target.gamma(u, v), -backward, forward);
  return (gamma + backward) / forward;
}

EdgeId mh_step(MHState& state, const ProposalKernel& q) {
  const auto& graph = *state.target->graph;
  const NodeId u = state.current;
  const auto out = graph.out_edges(u);
  std::vector<double> probs;
  q(u, probs);

  double draw = state.rng.uniform();
  std::size_t pick = out.size() - 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (draw < probs[i]) {
      pick = i;
      break;
    }
    draw -= probs[i];
  }
  const EdgeId proposed = out[pick];
  const NodeId v = graph.edge(proposed).dst;
  if (v == u) return proposed;

  const double ratio = hastings_ratio(u, v, *state.target, q);
  if (ratio >= 1.0 || state.rng.uniform() < ratio) {
    state.current = v;
    return proposed;
  }
  const auto loop = graph.self_loop(u);
  if (!loop) throw ValidationError("node " + std::to_string(u) + " has no self-loop to stay on");
  return *loop;
}

}  // namespace boil

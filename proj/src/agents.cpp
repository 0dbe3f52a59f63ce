#include "boil/agents.hpp"

#include <algorithm>
#include <array>

#include "boil/errors.hpp"

namespace boil {

namespace {

struct NamedKind {
  std::string_view name;
  StrategyKind kind;
};

constexpr std::array<NamedKind, 7> kNames{{
    {"random", StrategyKind::Random},
    {"opt-random", StrategyKind::OptRandom},
    {"frontier", StrategyKind::Frontier},
    {"sample", StrategyKind::Sample},
    {"comm-frontier", StrategyKind::CommFrontier},
    {"comm-sample", StrategyKind::CommSample},
    {"optimal", StrategyKind::Optimal},
}};

std::size_t pick(std::span<const double> probs, double draw) {
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (draw < probs[i]) return i;
    draw -= probs[i];
  }
  return probs.size() - 1;
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n.name;
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  if (key == "optrandom") key = "opt-random";
  if (key == "commfrontier") key = "comm-frontier";
  if (key == "commsample") key = "comm-sample";
  for (const auto& n : kNames) {
    if (n.name == key) return n.kind;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

bool needs_distribution(StrategyKind kind) {
  return kind == StrategyKind::Sample || kind == StrategyKind::CommSample || kind == StrategyKind::Optimal;
}

bool shares_counts(StrategyKind kind) {
  return kind == StrategyKind::CommFrontier || kind == StrategyKind::CommSample;
}

bool teleports(StrategyKind kind) { return kind == StrategyKind::Optimal || kind == StrategyKind::OptRandom; }

void validate_strategy(const StrategyConfig& config, bool has_distribution) {
  if (!(config.lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  if (needs_distribution(config.kind) && !has_distribution) {
    throw ConfigError("strategy '" + std::string(strategy_name(config.kind)) + "' needs a distribution");
  }
}

double frontier_term(EdgeId e, const VisibilityMap& vis, const CountVector& counts) {
  const auto row = vis.row(e);
  if (row.empty()) return kCountFloor;
  double total = 0.0;
  for (const auto& s : row) total += 1.0 / std::max(static_cast<double>(counts[s.node]), kCountFloor);
  return total / static_cast<double>(row.size());
}

void record_visibility(EdgeId e, const VisibilityMap& vis, CountVector& counts) {
  for (const auto& s : vis.row(e)) ++counts[s.node];
}

EdgeId random_step(NodeId u, const MovementGraph& graph, Rng& rng) {
  const auto out = graph.out_edges(u);
  return out[rng.index(out.size())];
}

void frontier_probabilities(NodeId u, const MovementGraph& graph, const VisibilityMap& vis,
                            const CountVector& counts, double scale, std::vector<double>& probs) {
  const auto out = graph.out_edges(u);
  probs.resize(out.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) total += (probs[i] = scale * frontier_term(out[i], vis, counts));
  for (double& p : probs) p /= total;
}

EdgeId frontier_step(NodeId u, const MovementGraph& graph, const VisibilityMap& vis, const CountVector& counts,
                     Rng& rng, double scale) {
  std::vector<double> probs;
  frontier_probabilities(u, graph, vis, counts, scale, probs);
  return graph.out_edges(u)[pick(probs, rng.uniform())];
}

void sample_proposal(NodeId u, const MovementGraph& graph, const VisibilityMap& vis, const CountVector& counts,
                     double lambda, double scale, std::vector<double>& probs) {
  const auto out = graph.out_edges(u);
  probs.resize(out.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    total += (probs[i] = 1.0 + lambda * scale * frontier_term(out[i], vis, counts));
  }
  for (double& p : probs) p /= total;
}

EdgeId sample_step(MHState& state, const VisibilityMap& vis, const CountVector& counts, double lambda,
                   double scale) {
  const auto& graph = *state.target->graph;
  const ProposalKernel q = [&](NodeId u, std::vector<double>& probs) {
    sample_proposal(u, graph, vis, counts, lambda, scale, probs);
  };
  return mh_step(state, q);
}

}  // namespace boil

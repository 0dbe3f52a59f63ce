#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "boil/environment.hpp"
#include "boil/rng.hpp"
#include "boil/sampler.hpp"
#include "boil/visibility.hpp"

namespace boil {

enum class StrategyKind { Random, OptRandom, Frontier, Sample, CommFrontier, CommSample, Optimal };

std::string_view strategy_name(StrategyKind kind);
/// Accepts names such as "random", "opt-random", "comm-sample". Throws ConfigError.
StrategyKind parse_strategy(std::string_view name);

/// Sample-family kinds and Optimal need a learned distribution.
bool needs_distribution(StrategyKind kind);
bool shares_counts(StrategyKind kind);
/// Optimal and OptRandom jump to any edge regardless of position.
bool teleports(StrategyKind kind);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::Random;
  double lambda = 10.0;
};

void validate_strategy(const StrategyConfig& config, bool has_distribution);

/// C(w): number of steps in which node w was in the visibility support.
using CountVector = std::vector<std::uint64_t>;

inline constexpr double kCountFloor = 1e-6;

/// Mean of 1 / max(C(w), floor) over the edge's visibility support; the
/// floor itself when the support is empty.
double frontier_term(EdgeId e, const VisibilityMap& vis, const CountVector& counts);

/// Adds one to C(w) for every node in the edge's visibility support.
void record_visibility(EdgeId e, const VisibilityMap& vis, CountVector& counts);

EdgeId random_step(NodeId u, const MovementGraph& graph, Rng& rng);

/// Normalised frontier probabilities over out_edges(u).
void frontier_probabilities(NodeId u, const MovementGraph& graph, const VisibilityMap& vis,
                            const CountVector& counts, double scale, std::vector<double>& probs);

EdgeId frontier_step(NodeId u, const MovementGraph& graph, const VisibilityMap& vis, const CountVector& counts,
                     Rng& rng, double scale = 1.0);

/// Q(u,v) = 1 + lambda * scale * frontier term, normalised over out_edges(u).
void sample_proposal(NodeId u, const MovementGraph& graph, const VisibilityMap& vis, const CountVector& counts,
                     double lambda, double scale, std::vector<double>& probs);

EdgeId sample_step(MHState& state, const VisibilityMap& vis, const CountVector& counts, double lambda,
                   double scale = 1.0);

inline EdgeId optimal_step(EdgeSampler& sampler, Rng& rng) { return sampler(rng); }

}  // namespace boil

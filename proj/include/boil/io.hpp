#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "boil/environment.hpp"
#include "boil/metrics.hpp"
#include "boil/simulator.hpp"
#include "boil/types.hpp"

namespace boil {

inline constexpr const char* kVersion = "0.1.0";

/// Learned chain as stored on disk ("dist/1").
struct DistributionFile {
  std::uint64_t env_hash = 0;
  TransitionVector transitions;
  StationaryDist stationary;
  EdgeDistribution edges;
  double loss = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
};

std::string distribution_to_json(const DistributionFile& dist, const MovementGraph& graph);
/// Throws ParseError on malformed text and ValidationError when the edge
/// list does not match `graph`.
DistributionFile distribution_from_json(const std::string& text, const MovementGraph& graph);
void save_distribution(const DistributionFile& dist, const MovementGraph& graph, const std::filesystem::path& path);
DistributionFile load_distribution(const std::filesystem::path& path, const MovementGraph& graph);

/// Simulation settings ("sim/1"). Placement is "uniform" or a node list.
std::string simulation_config_to_json(const SimulationConfig& config);
SimulationConfig simulation_config_from_json(const std::string& text);

/// Walks stored as lists of [row, col] cells ("paths/1"), mapped to nodes.
std::vector<std::vector<NodeId>> load_paths(const std::filesystem::path& path, const MovementGraph& graph);

void write_loss_trace_csv(const std::filesystem::path& path, const std::vector<double>& losses,
                          const std::vector<bool>& improved);

/// step,agent,edge_src,edge_dst with nodes given as cell indices when the
/// graph carries grid geometry.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace, const MovementGraph& graph);
/// Per-node counts: node,visibility_count,expected_count,variance,pair_count,agent_0,...
void write_node_summary_csv(const std::filesystem::path& path, const Trace& trace);
void write_marker_csv(const std::filesystem::path& path, const Trace& trace);

/// Rebuilds a trace from the step and node summary files.
Trace read_trace(const std::filesystem::path& steps_csv, const std::filesystem::path& nodes_csv,
                 const MovementGraph& graph);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file so readers never see partial output.
void write_text(const std::filesystem::path& path, const std::string& text);

/// %.17g text, which reads back to the same double.
std::string format_double(double v);

}  // namespace boil

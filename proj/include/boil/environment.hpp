#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "boil/types.hpp"

namespace boil {

enum class CellKind : std::uint8_t { Wall, Open };

struct Cell {
  CellKind kind = CellKind::Open;
  int elevation = 0;  // 0, 1 or 2; ignored for walls

  bool open() const { return kind == CellKind::Open; }
  bool operator==(const Cell&) const = default;
};

/// Row-major grid with a top-left origin. Markers are cell indices.
struct GridSpec {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;
  std::vector<int> markers;

  int index(int row, int col) const { return row * width + col; }
  bool contains(int row, int col) const {
    return row >= 0 && col >= 0 && row < height && col < width;
  }
  const Cell& at(int row, int col) const { return cells[index(row, col)]; }
  Cell& at(int row, int col) { return cells[index(row, col)]; }

  bool operator==(const GridSpec&) const = default;
};

/// Throws ValidationError (or EmptyGrid / AllWalls) naming the failed invariant.
void validate_grid(const GridSpec& grid);

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double traversal_time = 1.0;
};

/// Directed movement graph. Outgoing edges are indexed per node; for graphs
/// built from a grid the self-loop is always the first outgoing edge.
class MovementGraph {
 public:
  MovementGraph() = default;
  MovementGraph(std::size_t node_count, std::vector<Edge> edges);

  /// Attaches the grid geometry the nodes were derived from.
  void set_cells(int width, int height, std::vector<int> cell_of_node);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const EdgeId> out_edges(NodeId u) const {
    return {out_index_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
  }

  /// First edge inserted with this (src, dst) pair.
  std::optional<EdgeId> find_edge(NodeId src, NodeId dst) const;
  std::optional<EdgeId> self_loop(NodeId u) const { return find_edge(u, u); }

  bool has_cells() const { return !cell_of_node_.empty(); }
  int grid_width() const { return width_; }
  int grid_height() const { return height_; }
  int cell_of(NodeId u) const { return cell_of_node_[u]; }
  std::optional<NodeId> node_of_cell(int cell) const;

  /// Copy with extra edges appended after the existing ones.
  MovementGraph with_extra_edges(std::span<const Edge> extra) const;

 private:
  void build_index();

  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<EdgeId> out_index_;
  std::unordered_map<std::uint64_t, EdgeId> lookup_;

  int width_ = 0;
  int height_ = 0;
  std::vector<int> cell_of_node_;
  std::vector<std::int64_t> node_of_cell_;
};

/// 4-neighbour movement with the elevation rule: level or downhill moves to
/// any lower level are allowed, uphill only by one level. Every node gets a
/// self-loop; all traversal times are 1.
MovementGraph build_movement_graph(const GridSpec& grid);

struct ConnectivityReport {
  bool is_strong = false;
  std::vector<std::vector<NodeId>> components;
};

ConnectivityReport check_strong_connectivity(const MovementGraph& graph);

enum class EnvKind { Small, Large };

/// Procedural stand-ins for the reference maps: Small is 36x36 with
/// occluding walls, Large is 70x70 open terrain with smooth hills.
GridSpec generate_reference_env(EnvKind kind, std::uint64_t seed);

/// Walled terrain of arbitrary size; connectivity is repaired by walling off
/// everything outside the largest strongly connected component.
GridSpec generate_walled_env(int width, int height, std::uint64_t seed);

/// Wall-free terrain whose neighbouring cells differ by at most one level,
/// so every neighbour move is permitted in both directions.
GridSpec generate_open_terrain(int width, int height, std::uint64_t seed);

GridSpec load_environment(const std::filesystem::path& path);
void save_environment(const GridSpec& grid, const std::filesystem::path& path);
std::string environment_to_json(const GridSpec& grid);
GridSpec environment_from_json(const std::string& text);

/// 64-bit FNV-1a over the canonical serialisation.
std::uint64_t environment_hash(const GridSpec& grid);

}  // namespace boil

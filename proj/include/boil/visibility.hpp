#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "boil/environment.hpp"
#include "boil/types.hpp"

namespace boil {

enum class FieldOfView { ForwardHalfPlane, Omni };

struct VisibilityParams {
  double radius = 3.5;
  FieldOfView fov = FieldOfView::ForwardHalfPlane;
  int samples_per_edge = 4;

  bool operator==(const VisibilityParams&) const = default;
};

void validate_params(const VisibilityParams& params);

struct SparseEntry {
  NodeId node;
  double value;

  bool operator==(const SparseEntry&) const = default;
};

using SparseVector = std::vector<SparseEntry>;

/// Per-edge sparse rows over nodes (CSR). Stored values lie in (0, 1];
/// absent entries are zero. Also used for reachability maps.
class VisibilityMap {
 public:
  VisibilityMap() = default;
  explicit VisibilityMap(std::size_t node_count) : node_count_(node_count) {}

  std::size_t node_count() const { return node_count_; }
  std::size_t row_count() const { return offsets_.size() - 1; }
  std::size_t nonzeros() const { return entries_.size(); }

  std::span<const SparseEntry> row(EdgeId e) const {
    return {entries_.data() + offsets_[e], offsets_[e + 1] - offsets_[e]};
  }

  /// Appends a row; entries must be sorted by node and lie in (0, 1].
  EdgeId append_row(std::span<const SparseEntry> entries);

  double value(EdgeId e, NodeId w) const;

  bool operator==(const VisibilityMap&) const = default;

 private:
  std::size_t node_count_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<SparseEntry> entries_;
};

struct Point {
  double x = 0.0;  // column axis, cell c spans [c, c+1)
  double y = 0.0;  // row axis
};

struct Observer {
  Point position;
  int elevation = 0;
};

/// Ray-cast visibility of one target cell. Walls on the ray block sight, as
/// does any intermediate open cell higher than both the observer and the
/// target. With a heading and a forward half-plane field of view, targets
/// behind the observer are invisible. The observer's own cell is always seen.
bool line_of_sight(const GridSpec& grid, const Observer& observer, int target_cell,
                   const VisibilityParams& params, std::optional<Point> heading = std::nullopt);

/// Cells visited by the segment a -> b, including cells touched only at a
/// corner. Exposed for tests.
std::vector<int> supercover_cells(const GridSpec& grid, Point a, Point b);

/// Fraction of equally spaced sample points along the edge from which each
/// node is visible. Self-loops use an omnidirectional view from the centre.
SparseVector edge_visibility(const GridSpec& grid, const MovementGraph& graph, EdgeId edge,
                             const VisibilityParams& params);

VisibilityMap compute_visibility(const GridSpec& grid, const MovementGraph& graph,
                                 const VisibilityParams& params);

/// Time-weighted composition of two visibility vectors.
SparseVector compose_visibility(std::span<const SparseEntry> first, double first_time,
                                std::span<const SparseEntry> second, double second_time);

/// Visibility of a contiguous walk: sum_i T_i V(e_i) / sum_i T_i.
SparseVector path_visibility(const VisibilityMap& vis, const MovementGraph& graph,
                             std::span<const EdgeId> path, std::span<const double> times);

/// Cache key covering both the grid and the ray-casting parameters.
std::uint64_t visibility_hash(const GridSpec& grid, const VisibilityParams& params);

void save_visibility(const VisibilityMap& vis, std::uint64_t key, const std::filesystem::path& path);
/// Throws ValidationError when the stored key differs from `expected_key`.
VisibilityMap load_visibility(const std::filesystem::path& path, std::uint64_t expected_key);

}  // namespace boil

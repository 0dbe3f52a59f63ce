#include "boil/visibility.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "boil/errors.hpp"

namespace boil {

void validate_params(const VisibilityParams& params) {
  if (!(params.radius > 0.0)) throw ConfigError("visibility radius must be positive");
  if (params.samples_per_edge < 1) throw ConfigError("samples_per_edge must be at least 1");
}

EdgeId VisibilityMap::append_row(std::span<const SparseEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].node >= node_count_) throw DimensionMismatch("visibility entry outside node range");
    if (!(entries[i].value > 0.0 && entries[i].value <= 1.0)) {
      throw ValidationError("visibility values must lie in (0, 1]");
    }
    if (i > 0 && entries[i - 1].node >= entries[i].node) {
      throw ValidationError("visibility row must be sorted by node");
    }
  }
  entries_.insert(entries_.end(), entries.begin(), entries.end());
  offsets_.push_back(entries_.size());
  return static_cast<EdgeId>(offsets_.size() - 2);
}

double VisibilityMap::value(EdgeId e, NodeId w) const {
  const auto r = row(e);
  auto it = std::lower_bound(r.begin(), r.end(), w,
                             [](const SparseEntry& s, NodeId n) { return s.node < n; });
  return (it != r.end() && it->node == w) ? it->value : 0.0;
}

// ---------------------------------------------------------------------------
// Ray casting

std::vector<int> supercover_cells(const GridSpec& grid, Point a, Point b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kTie = 1e-12;
  int cx = static_cast<int>(std::floor(a.x));
  int cy = static_cast<int>(std::floor(a.y));
  const int tx = static_cast<int>(std::floor(b.x));
  const int ty = static_cast<int>(std::floor(b.y));
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double delta_x = step_x ? 1.0 / std::abs(dx) : kInf;
  const double delta_y = step_y ? 1.0 / std::abs(dy) : kInf;
  double t_x = step_x > 0 ? (cx + 1 - a.x) / dx : (step_x < 0 ? (a.x - cx) / -dx : kInf);
  double t_y = step_y > 0 ? (cy + 1 - a.y) / dy : (step_y < 0 ? (a.y - cy) / -dy : kInf);

  std::vector<int> cells;
  auto push = [&](int col, int row) {
    if (grid.contains(row, col)) cells.push_back(grid.index(row, col));
  };
  push(cx, cy);
  while (cx != tx || cy != ty) {
    const double t = std::min(t_x, t_y);
    if (t > 1.0 + kTie) break;
    if (std::abs(t_x - t_y) <= kTie) {
      // Exact corner crossing: both side cells are touched.
      push(cx + step_x, cy);
      push(cx, cy + step_y);
      cx += step_x;
      cy += step_y;
      t_x += delta_x;
      t_y += delta_y;
    } else if (t_x < t_y) {
      cx += step_x;
      t_x += delta_x;
    } else {
      cy += step_y;
      t_y += delta_y;
    }
    push(cx, cy);
  }
  return cells;
}

bool line_of_sight(const GridSpec& grid, const Observer& observer, int target_cell,
                   const VisibilityParams& params, std::optional<Point> heading) {
  if (target_cell < 0 || static_cast<std::size_t>(target_cell) >= grid.cells.size()) {
    throw OutOfBounds("target cell " + std::to_string(target_cell) + " outside grid");
  }
  const int ocol = static_cast<int>(std::floor(observer.position.x));
  const int orow = static_cast<int>(std::floor(observer.position.y));
  if (!grid.contains(orow, ocol)) throw OutOfBounds("observer position outside grid");
  const int observer_cell = grid.index(orow, ocol);
  if (!grid.cells[observer_cell].open()) throw OutOfBounds("observer stands on a wall cell");

  const Cell& target = grid.cells[target_cell];
  if (!target.open()) return false;
  if (target_cell == observer_cell) return true;

  const Point centre{target_cell % grid.width + 0.5, target_cell / grid.width + 0.5};
  const double dx = centre.x - observer.position.x;
  const double dy = centre.y - observer.position.y;
  if (dx * dx + dy * dy > params.radius * params.radius + 1e-9) return false;
  if (heading && params.fov == FieldOfView::ForwardHalfPlane &&
      dx * heading->x + dy * heading->y < -1e-12) {
    return false;
  }

  const int ceiling = std::max(observer.elevation, target.elevation);
  for (int cell : supercover_cells(grid, observer.position, centre)) {
    if (cell == observer_cell || cell == target_cell) continue;
    const Cell& c = grid.cells[cell];
    if (!c.open()) return false;
    if (c.elevation > ceiling) return false;
  }
  return true;
}

namespace {

Point cell_centre(const GridSpec& grid, int cell) {
  return {cell % grid.width + 0.5, cell / grid.width + 0.5};
}

void visible_cells(const GridSpec& grid, const Observer& obs, const VisibilityParams& params,
                   std::optional<Point> heading, std::vector<int>& out) {
  const int r = static_cast<int>(std::ceil(params.radius)) + 1;
  const int ocol = static_cast<int>(std::floor(obs.position.x));
  const int orow = static_cast<int>(std::floor(obs.position.y));
  for (int row = std::max(0, orow - r); row <= std::min(grid.height - 1, orow + r); ++row) {
    for (int col = std::max(0, ocol - r); col <= std::min(grid.width - 1, ocol + r); ++col) {
      const int cell = grid.index(row, col);
      if (line_of_sight(grid, obs, cell, params, heading)) out.push_back(cell);
    }
  }
}

}  // namespace

SparseVector edge_visibility(const GridSpec& grid, const MovementGraph& graph, EdgeId edge,
                             const VisibilityParams& params) {
  validate_params(params);
  if (!graph.has_cells()) throw ValidationError("graph carries no grid geometry");
  const Edge& e = graph.edge(edge);
  const Point a = cell_centre(grid, graph.cell_of(e.src));
  const Point b = cell_centre(grid, graph.cell_of(e.dst));

  std::map<int, int> hits;
  std::vector<int> seen;
  int samples = params.samples_per_edge;
  if (e.src == e.dst) {
    samples = 1;
    VisibilityParams omni = params;
    omni.fov = FieldOfView::Omni;
    visible_cells(grid, Observer{a, grid.cells[graph.cell_of(e.src)].elevation}, omni, std::nullopt, seen);
    for (int c : seen) ++hits[c];
  } else {
    const Point heading{b.x - a.x, b.y - a.y};
    for (int k = 0; k < samples; ++k) {
      const double t = (k + 0.5) / samples;
      const Point p{a.x + t * heading.x, a.y + t * heading.y};
      const Cell& here = grid.at(static_cast<int>(std::floor(p.y)), static_cast<int>(std::floor(p.x)));
      seen.clear();
      visible_cells(grid, Observer{p, here.elevation}, params, heading, seen);
      for (int c : seen) ++hits[c];
    }
  }

  SparseVector out;
  for (const auto& [cell, count] : hits) {
    const auto node = graph.node_of_cell(cell);
    if (node) out.push_back({*node, static_cast<double>(count) / samples});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.node < y.node; });
  return out;
}

VisibilityMap compute_visibility(const GridSpec& grid, const MovementGraph& graph,
                                 const VisibilityParams& params) {
  VisibilityMap vis(graph.node_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) vis.append_row(edge_visibility(grid, graph, e, params));
  return vis;
}

// ---------------------------------------------------------------------------
// Composition

SparseVector compose_visibility(std::span<const SparseEntry> first, double first_time,
                                std::span<const SparseEntry> second, double second_time) {
  const double total = first_time + second_time;
  SparseVector out;
  out.reserve(first.size() + second.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < first.size() || j < second.size()) {
    NodeId node;
    double sum = 0.0;
    if (j == second.size() || (i < first.size() && first[i].node < second[j].node)) {
      node = first[i].node;
      sum = first_time * first[i++].value;
    } else if (i == first.size() || second[j].node < first[i].node) {
      node = second[j].node;
      sum = second_time * second[j++].value;
    } else {
      node = first[i].node;
      sum = first_time * first[i++].value + second_time * second[j++].value;
    }
    const double v = std::min(1.0, sum / total);
    if (v > 0.0) out.push_back({node, v});
  }
  return out;
}

SparseVector path_visibility(const VisibilityMap& vis, const MovementGraph& graph,
                             std::span<const EdgeId> path, std::span<const double> times) {
  if (path.empty()) throw NonContiguousPath("empty path");
  if (path.size() != times.size()) throw DimensionMismatch("path and times differ in length");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (graph.edge(path[i]).dst != graph.edge(path[i + 1]).src) {
      throw NonContiguousPath("edge " + std::to_string(path[i]) + " does not end where edge " +
                              std::to_string(path[i + 1]) + " starts");
    }
  }
  std::map<NodeId, double> acc;
  double total = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    total += times[i];
    for (const auto& s : vis.row(path[i])) acc[s.node] += times[i] * s.value;
  }
  SparseVector out;
  for (const auto& [node, sum] : acc) {
    const double v = std::min(1.0, sum / total);
    if (v > 0.0) out.push_back({node, v});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cache files

std::uint64_t visibility_hash(const GridSpec& grid, const VisibilityParams& params) {
  std::uint64_t h = environment_hash(grid);
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(std::bit_cast<std::uint64_t>(params.radius));
  feed(params.fov == FieldOfView::Omni ? 1 : 0);
  feed(static_cast<std::uint64_t>(params.samples_per_edge));
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

}  // namespace

void save_visibility(const VisibilityMap& vis, std::uint64_t key, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["version"] = "vis/1";
  doc["key"] = hex64(key);
  doc["node_count"] = vis.node_count();
  auto rows = nlohmann::json::array();
  for (EdgeId e = 0; e < vis.row_count(); ++e) {
    auto row = nlohmann::json::array();
    for (const auto& s : vis.row(e)) row.push_back({s.node, s.value});
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write visibility cache " + path.string());
  out << doc.dump() << "\n";
}

VisibilityMap load_visibility(const std::filesystem::path& path, std::uint64_t expected_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open visibility cache " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed visibility cache: ") + e.what(), 0, e.byte);
  }
  if (doc.value("version", "") != "vis/1") throw ValidationError("unsupported visibility cache version");
  if (doc.value("key", "") != hex64(expected_key)) {
    throw ValidationError("visibility cache key mismatch: built for a different grid or parameters");
  }
  VisibilityMap vis(doc.at("node_count").get<std::size_t>());
  SparseVector row;
  for (const auto& r : doc.at("rows")) {
    row.clear();
    for (const auto& pair : r) row.push_back({pair.at(0).get<NodeId>(), pair.at(1).get<double>()});
    vis.append_row(row);
  }
  return vis;
}

}  // namespace boil

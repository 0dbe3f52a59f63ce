#include "boil/environment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "boil/errors.hpp"
#include "boil/rng.hpp"

namespace boil {

namespace {

constexpr std::array<std::array<int, 2>, 4> kNeighbours{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};

std::uint64_t pair_key(NodeId a, NodeId b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

bool move_allowed(const Cell& from, const Cell& to) {
  return to.open() && (to.elevation <= from.elevation || to.elevation == from.elevation + 1);
}

}  // namespace

void validate_grid(const GridSpec& grid) {
  if (grid.width <= 0 || grid.height <= 0) throw EmptyGrid();
  const auto expected = static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height);
  if (grid.cells.size() != expected) {
    throw ValidationError("cells length " + std::to_string(grid.cells.size()) +
                          " != width x height (" + std::to_string(expected) + ")");
  }
  bool any_open = false;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const Cell& c = grid.cells[i];
    if (c.open()) {
      any_open = true;
      if (c.elevation < 0 || c.elevation > 2) {
        throw ValidationError("cell " + std::to_string(i) + " has elevation outside {0,1,2}");
      }
    }
  }
  if (!any_open) throw AllWalls();
  for (int m : grid.markers) {
    if (m < 0 || static_cast<std::size_t>(m) >= grid.cells.size()) {
      throw ValidationError("marker " + std::to_string(m) + " is outside the grid");
    }
    if (!grid.cells[m].open()) {
      throw ValidationError("marker " + std::to_string(m) + " refers to a wall cell");
    }
  }
}

// ---------------------------------------------------------------------------
// MovementGraph

MovementGraph::MovementGraph(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.src >= node_count_ || e.dst >= node_count_) {
      throw ValidationError("edge endpoint outside node range");
    }
    if (!(e.traversal_time > 0.0)) throw ValidationError("traversal time must be positive");
  }
  build_index();
}

void MovementGraph::build_index() {
  out_offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) ++out_offsets_[e.src + 1];
  for (std::size_t u = 0; u < node_count_; ++u) out_offsets_[u + 1] += out_offsets_[u];
  out_index_.assign(edges_.size(), 0);
  std::vector<std::size_t> fill(out_offsets_.begin(), out_offsets_.end() - 1);
  lookup_.clear();
  lookup_.reserve(edges_.size());
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    out_index_[fill[edges_[e].src]++] = e;
    lookup_.emplace(pair_key(edges_[e].src, edges_[e].dst), e);
  }
}

void MovementGraph::set_cells(int width, int height, std::vector<int> cell_of_node) {
  if (cell_of_node.size() != node_count_) {
    throw ValidationError("cell map size does not match node count");
  }
  width_ = width;
  height_ = height;
  cell_of_node_ = std::move(cell_of_node);
  node_of_cell_.assign(static_cast<std::size_t>(width) * height, -1);
  for (NodeId u = 0; u < node_count_; ++u) node_of_cell_[cell_of_node_[u]] = u;
}

std::optional<EdgeId> MovementGraph::find_edge(NodeId src, NodeId dst) const {
  auto it = lookup_.find(pair_key(src, dst));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> MovementGraph::node_of_cell(int cell) const {
  if (cell < 0 || static_cast<std::size_t>(cell) >= node_of_cell_.size()) return std::nullopt;
  const auto n = node_of_cell_[cell];
  if (n < 0) return std::nullopt;
  return static_cast<NodeId>(n);
}

MovementGraph MovementGraph::with_extra_edges(std::span<const Edge> extra) const {
  std::vector<Edge> all(edges_.begin(), edges_.end());
  all.insert(all.end(), extra.begin(), extra.end());
  MovementGraph g(node_count_, std::move(all));
  if (has_cells()) g.set_cells(width_, height_, cell_of_node_);
  return g;
}

MovementGraph build_movement_graph(const GridSpec& grid) {
  validate_grid(grid);
  std::vector<int> cell_of_node;
  std::vector<std::int64_t> node_of_cell(grid.cells.size(), -1);
  for (int i = 0; i < static_cast<int>(grid.cells.size()); ++i) {
    if (grid.cells[i].open()) {
      node_of_cell[i] = static_cast<std::int64_t>(cell_of_node.size());
      cell_of_node.push_back(i);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(cell_of_node.size() * 5);
  for (NodeId u = 0; u < cell_of_node.size(); ++u) {
    const int cell = cell_of_node[u];
    const int row = cell / grid.width;
    const int col = cell % grid.width;
    edges.push_back({u, u, 1.0});
    for (const auto& d : kNeighbours) {
      const int r = row + d[0];
      const int c = col + d[1];
      if (!grid.contains(r, c)) continue;
      if (!move_allowed(grid.at(row, col), grid.at(r, c))) continue;
      edges.push_back({u, static_cast<NodeId>(node_of_cell[grid.index(r, c)]), 1.0});
    }
  }
  MovementGraph g(cell_of_node.size(), std::move(edges));
  g.set_cells(grid.width, grid.height, std::move(cell_of_node));
  return g;
}

// ---------------------------------------------------------------------------
// Strong connectivity (iterative Tarjan)

ConnectivityReport check_strong_connectivity(const MovementGraph& graph) {
  const std::size_t n = graph.node_count();
  constexpr std::int64_t kUnvisited = -1;
  std::vector<std::int64_t> index(n, kUnvisited);
  std::vector<std::int64_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  ConnectivityReport report;

  struct Frame {
    NodeId node;
    std::size_t next_edge;
  };
  std::vector<Frame> call;
  std::int64_t counter = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      const auto out = graph.out_edges(f.node);
      if (f.next_edge < out.size()) {
        const NodeId w = graph.edge(out[f.next_edge++]).dst;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const NodeId v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<NodeId> component;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        report.components.push_back(std::move(component));
      }
    }
  }
  report.is_strong = n > 0 && report.components.size() == 1;
  return report;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

struct Hill {
  double row, col, sigma, amplitude;
};

std::vector<double> hill_field(int width, int height, const std::vector<Hill>& hills) {
  std::vector<double> field(static_cast<std::size_t>(width) * height, 0.0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = 0.0;
      for (const Hill& h : hills) {
        const double dr = r - h.row;
        const double dc = c - h.col;
        v += h.amplitude * std::exp(-(dr * dr + dc * dc) / (2.0 * h.sigma * h.sigma));
      }
      field[static_cast<std::size_t>(r) * width + c] = v;
    }
  }
  const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
  const double span = *hi - *lo;
  const double base = *lo;
  for (double& v : field) v = span > 0.0 ? (v - base) / span : 0.0;
  return field;
}

std::vector<Hill> random_hills(Rng& rng, int width, int height, int count, double min_sigma,
                               double max_sigma) {
  std::vector<Hill> hills;
  for (int i = 0; i < count; ++i) {
    hills.push_back({rng.uniform() * height, rng.uniform() * width,
                     min_sigma + rng.uniform() * (max_sigma - min_sigma),
                     0.5 + 0.5 * rng.uniform()});
  }
  return hills;
}

int quantize(double v) {
  if (v < 0.45) return 0;
  if (v < 0.72) return 1;
  return 2;
}

int nearest_open(const GridSpec& g, double row, double col, const std::vector<int>& taken) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(g.cells.size()); ++i) {
    if (!g.cells[i].open()) continue;
    if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
    const double dr = i / g.width - row;
    const double dc = i % g.width - col;
    const double d = dr * dr + dc * dc;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Highest open cell, preferring ones surrounded by high ground.
int high_ground(const GridSpec& g, const std::vector<int>& taken) {
  int best = -1;
  int best_score = -1;
  for (int i = 0; i < static_cast<int>(g.cells.size()); ++i) {
    if (!g.cells[i].open()) continue;
    if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
    const int row = i / g.width;
    const int col = i % g.width;
    int score = 100 * g.cells[i].elevation;
    for (int dr = -2; dr <= 2; ++dr) {
      for (int dc = -2; dc <= 2; ++dc) {
        if (!g.contains(row + dr, col + dc)) continue;
        const Cell& n = g.at(row + dr, col + dc);
        if (n.open() && n.elevation >= g.cells[i].elevation) ++score;
      }
    }
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

void place_markers(GridSpec& g) {
  std::vector<int> m;
  m.push_back(nearest_open(g, 0.0, 0.0, m));
  m.push_back(high_ground(g, m));
  m.push_back(nearest_open(g, g.height - 1.0, g.width - 1.0, m));
  m.push_back(nearest_open(g, (g.height - 1) / 2.0, (g.width - 1) / 2.0, m));
  m.erase(std::remove(m.begin(), m.end(), -1), m.end());
  g.markers = std::move(m);
}

void keep_largest_component(GridSpec& g) {
  const MovementGraph graph = build_movement_graph(g);
  const auto report = check_strong_connectivity(graph);
  if (report.is_strong) return;
  const auto largest = std::max_element(
      report.components.begin(), report.components.end(),
      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  std::vector<bool> keep(graph.node_count(), false);
  for (NodeId u : *largest) keep[u] = true;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    if (!keep[u]) g.cells[graph.cell_of(u)] = Cell{CellKind::Wall, 0};
  }
}

}  // namespace

GridSpec generate_walled_env(int width, int height, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw EmptyGrid();
  Rng rng(seed);
  GridSpec g;
  g.width = width;
  g.height = height;
  const double scale = std::max(width, height);
  const int hill_count = std::max(2, width * height / 250);
  const auto field = hill_field(width, height,
                                random_hills(rng, width, height, hill_count, scale / 10.0, scale / 5.0));
  g.cells.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) g.cells[i] = Cell{CellKind::Open, quantize(field[i])};

  // Straight wall segments, each broken by one doorway.
  const int segments = std::max(1, (width + height) / 12);
  for (int s = 0; s < segments; ++s) {
    const bool horizontal = rng.uniform() < 0.5;
    const int along = horizontal ? width : height;
    const int across = horizontal ? height : width;
    const int length = std::max(3, static_cast<int>(along * (0.3 + 0.3 * rng.uniform())));
    const int start = static_cast<int>(rng.index(static_cast<std::size_t>(std::max(1, along - length + 1))));
    const int line = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(std::max(1, across - 2))));
    const int door = start + 1 + static_cast<int>(rng.index(static_cast<std::size_t>(std::max(1, length - 3))));
    for (int k = start; k < std::min(along, start + length); ++k) {
      if (k == door || k == door + 1) continue;
      const int r = horizontal ? line : k;
      const int c = horizontal ? k : line;
      g.at(r, c) = Cell{CellKind::Wall, 0};
    }
  }
  if (std::none_of(g.cells.begin(), g.cells.end(), [](const Cell& c) { return c.open(); })) {
    g.cells[0] = Cell{CellKind::Open, 0};
  }
  keep_largest_component(g);
  place_markers(g);
  return g;
}

GridSpec generate_open_terrain(int width, int height, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw EmptyGrid();
  Rng rng(seed);
  GridSpec g;
  g.width = width;
  g.height = height;
  const double scale = std::max(width, height);
  const int hill_count = 3 + width * height / 600;
  const auto field = hill_field(width, height,
                                random_hills(rng, width, height, hill_count, scale / 12.0, scale / 6.0));
  g.cells.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) g.cells[i] = Cell{CellKind::Open, quantize(field[i])};

  // Lower any cell more than one level above a neighbour until none remain.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        int lowest = g.at(r, c).elevation;
        for (const auto& d : kNeighbours) {
          if (g.contains(r + d[0], c + d[1])) lowest = std::min(lowest, g.at(r + d[0], c + d[1]).elevation);
        }
        if (g.at(r, c).elevation > lowest + 1) {
          g.at(r, c).elevation = lowest + 1;
          changed = true;
        }
      }
    }
  }
  place_markers(g);
  return g;
}

GridSpec generate_reference_env(EnvKind kind, std::uint64_t seed) {
  switch (kind) {
    case EnvKind::Small:
      return generate_walled_env(36, 36, seed);
    case EnvKind::Large:
      return generate_open_terrain(70, 70, seed);
  }
  throw ConfigError("unknown environment kind");
}

// ---------------------------------------------------------------------------
// Persistence

std::string environment_to_json(const GridSpec& grid) {
  std::ostringstream out;
  out << "{\n  \"version\": \"env/1\",\n  \"width\": " << grid.width << ",\n  \"height\": " << grid.height
      << ",\n  \"cells\": [\n";
  for (int r = 0; r < grid.height; ++r) {
    out << "    ";
    for (int c = 0; c < grid.width; ++c) {
      const Cell& cell = grid.at(r, c);
      out << "{\"kind\":\"" << (cell.open() ? "open" : "wall") << "\",\"elev\":" << cell.elevation << "}";
      if (r + 1 < grid.height || c + 1 < grid.width) out << ",";
    }
    out << "\n";
  }
  out << "  ],\n  \"markers\": [";
  for (std::size_t i = 0; i < grid.markers.size(); ++i) out << (i ? ", " : "") << grid.markers[i];
  out << "]\n}\n";
  return out.str();
}

GridSpec environment_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const std::size_t line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
    throw ParseError(std::string("malformed environment file: ") + e.what(), line, offset);
  }
  GridSpec g;
  try {
    if (doc.at("version").get<std::string>() != "env/1") {
      throw ValidationError("unsupported environment version '" + doc.at("version").get<std::string>() + "'");
    }
    g.width = doc.at("width").get<int>();
    g.height = doc.at("height").get<int>();
    for (const auto& c : doc.at("cells")) {
      const auto kind = c.at("kind").get<std::string>();
      if (kind != "open" && kind != "wall") throw ValidationError("unknown cell kind '" + kind + "'");
      g.cells.push_back(Cell{kind == "open" ? CellKind::Open : CellKind::Wall, c.value("elev", 0)});
    }
    g.markers = doc.at("markers").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("environment file structure: ") + e.what());
  }
  validate_grid(g);
  return g;
}

GridSpec load_environment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open environment file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return environment_from_json(buffer.str());
}

void save_environment(const GridSpec& grid, const std::filesystem::path& path) {
  validate_grid(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write environment file " + path.string());
  out << environment_to_json(grid);
}

std::uint64_t environment_hash(const GridSpec& grid) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::int64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= static_cast<std::uint64_t>((v >> (8 * i)) & 0xff);
      h *= 0x100000001b3ULL;
    }
  };
  feed(grid.width);
  feed(grid.height);
  for (const Cell& c : grid.cells) feed(c.open() ? 1 + c.elevation : 0);
  feed(static_cast<std::int64_t>(grid.markers.size()));
  for (int m : grid.markers) feed(m);
  return h;
}

}  // namespace boil

#include <doctest.h>

#include <fstream>
#include <set>

#include "boil/environment.hpp"
#include "boil/errors.hpp"
#include "support.hpp"

using namespace boil;

namespace {

std::set<std::pair<NodeId, NodeId>> edge_set(const MovementGraph& g) {
  std::set<std::pair<NodeId, NodeId>> s;
  for (const auto& e : g.edges()) s.insert({e.src, e.dst});
  return s;
}

}  // namespace

TEST_CASE("flat 1x2 grid has two self-loops and both directions") {
  const auto g = build_movement_graph(testing::open_grid(2, 1));
  CHECK(g.node_count() == 2);
  CHECK(edge_set(g) == std::set<std::pair<NodeId, NodeId>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  for (const auto& e : g.edges()) CHECK(e.traversal_time == 1.0);
}

TEST_CASE("two-level ascent is forbidden but descent is allowed") {
  auto grid = testing::open_grid(2, 1);
  grid.at(0, 1).elevation = 2;
  const auto g = build_movement_graph(grid);
  CHECK(edge_set(g) == std::set<std::pair<NodeId, NodeId>>{{0, 0}, {1, 0}, {1, 1}});
  const auto report = check_strong_connectivity(g);
  CHECK_FALSE(report.is_strong);
  CHECK(report.components.size() == 2);
}

TEST_CASE("one-level ascent is allowed") {
  auto grid = testing::open_grid(2, 1);
  grid.at(0, 1).elevation = 1;
  const auto g = build_movement_graph(grid);
  CHECK(g.find_edge(0, 1).has_value());
  CHECK(g.find_edge(1, 0).has_value());
}

TEST_CASE("3x3 grid with a wall in the centre forms a ring") {
  auto grid = testing::open_grid(3, 3);
  grid.at(1, 1).kind = CellKind::Wall;
  const auto g = build_movement_graph(grid);
  CHECK(g.node_count() == 8);
  // 8 self-loops plus 8 ring neighbours in both directions.
  CHECK(g.edge_count() == 8 + 16);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    CHECK(g.out_edges(u).size() == 3);
    CHECK(g.self_loop(u).has_value());
  }
  CHECK(check_strong_connectivity(g).is_strong);
}

TEST_CASE("strong connectivity on hand-built graphs") {
  const auto cycle = testing::make_graph(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {2, 0}});
  const auto r1 = check_strong_connectivity(cycle);
  CHECK(r1.is_strong);
  CHECK(r1.components.size() == 1);

  const auto loops = testing::make_graph(2, {{0, 0}, {1, 1}});
  const auto r2 = check_strong_connectivity(loops);
  CHECK_FALSE(r2.is_strong);
  CHECK(r2.components.size() == 2);
}

TEST_CASE("grid validation errors") {
  GridSpec empty;
  CHECK_THROWS_AS(build_movement_graph(empty), EmptyGrid);

  auto walls = testing::open_grid(2, 2);
  for (auto& c : walls.cells) c.kind = CellKind::Wall;
  CHECK_THROWS_AS(build_movement_graph(walls), AllWalls);

  auto short_cells = testing::open_grid(2, 2);
  short_cells.cells.pop_back();
  CHECK_THROWS_AS(validate_grid(short_cells), ValidationError);

  auto wall_marker = testing::open_grid(2, 2);
  wall_marker.at(0, 0).kind = CellKind::Wall;
  wall_marker.markers = {0};
  CHECK_THROWS_AS(validate_grid(wall_marker), ValidationError);
}

TEST_CASE("movement never ascends more than one level") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto grid = generate_reference_env(EnvKind::Small, seed);
    const auto g = build_movement_graph(grid);
    for (const auto& e : g.edges()) {
      const auto& from = grid.cells[g.cell_of(e.src)];
      const auto& to = grid.cells[g.cell_of(e.dst)];
      CHECK(to.elevation <= from.elevation + 1);
    }
  }
}

TEST_CASE("reference environments") {
  const auto small = generate_reference_env(EnvKind::Small, 0);
  CHECK(small.width == 36);
  CHECK(small.height == 36);
  CHECK(small.markers.size() == 4);
  std::set<int> levels;
  int walls = 0;
  for (const auto& c : small.cells) {
    if (c.open()) levels.insert(c.elevation);
    walls += !c.open();
  }
  CHECK(levels.size() == 3);
  CHECK(walls > 0);
  const auto gs = build_movement_graph(small);
  CHECK(check_strong_connectivity(gs).is_strong);
  for (NodeId u = 0; u < gs.node_count(); ++u) CHECK(gs.self_loop(u).has_value());
  CHECK(generate_reference_env(EnvKind::Small, 0) == small);
  CHECK_FALSE(generate_reference_env(EnvKind::Small, 1) == small);

  const auto large = generate_reference_env(EnvKind::Large, 0);
  CHECK(large.width == 70);
  CHECK(large.height == 70);
  for (const auto& c : large.cells) CHECK(c.open());
  const auto gl = build_movement_graph(large);
  CHECK(check_strong_connectivity(gl).is_strong);
  // Movement is unconstrained: every interior cell keeps all four neighbours.
  for (NodeId u = 0; u < gl.node_count(); ++u) {
    const int cell = gl.cell_of(u);
    const int r = cell / large.width;
    const int c = cell % large.width;
    const int expected = 1 + (r > 0) + (r < large.height - 1) + (c > 0) + (c < large.width - 1);
    CHECK(static_cast<int>(gl.out_edges(u).size()) == expected);
  }
}

TEST_CASE("custom sizes stay strongly connected") {
  for (int size : {12, 51}) {
    const auto g = build_movement_graph(generate_walled_env(size, size, 7));
    CHECK(check_strong_connectivity(g).is_strong);
  }
}

TEST_CASE("environment files round-trip") {
  const auto dir = testing::scratch_dir("env");
  const auto grid = generate_reference_env(EnvKind::Small, 3);
  save_environment(grid, dir / "small.json");
  CHECK(load_environment(dir / "small.json") == grid);
  CHECK(environment_hash(load_environment(dir / "small.json")) == environment_hash(grid));

  std::ofstream(dir / "broken.json") << "{\"version\": \"env/1\", \"width\": 2,\n  oops";
  CHECK_THROWS_AS(load_environment(dir / "broken.json"), ParseError);
  std::ofstream(dir / "future.json") << R"({"version": "env/9", "width": 1, "height": 1,
    "cells": [{"kind": "open", "elev": 0}], "markers": []})";
  CHECK_THROWS_AS(load_environment(dir / "future.json"), ValidationError);
  std::ofstream(dir / "short.json") << R"({"version": "env/1", "width": 2, "height": 1,
    "cells": [{"kind": "open", "elev": 0}], "markers": []})";
  CHECK_THROWS_AS(load_environment(dir / "short.json"), ValidationError);
}

TEST_CASE("extra edges keep the base edge ids") {
  const auto g = testing::make_graph(2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<Edge> extra{{0, 1, 3.0}};
  const auto h = g.with_extra_edges(extra);
  CHECK(h.edge_count() == 5);
  CHECK(h.edge(4).traversal_time == 3.0);
  CHECK(h.out_edges(0).size() == 3);
  for (EdgeId e = 0; e < 4; ++e) CHECK(h.edge(e).dst == g.edge(e).dst);
}

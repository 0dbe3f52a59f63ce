// Shared fixtures and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "boil/environment.hpp"
#include "boil/rng.hpp"
#include "boil/types.hpp"
#include "boil/visibility.hpp"

namespace testing {

using boil::EdgeId;
using boil::NodeId;

/// Graph from (src, dst) pairs with unit traversal times.
inline boil::MovementGraph make_graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> pairs) {
  std::vector<boil::Edge> edges;
  for (const auto& [s, d] : pairs) edges.push_back({s, d, 1.0});
  return boil::MovementGraph(n, std::move(edges));
}

/// Self-loops, a directed ring through every node and `extra` random chords.
inline boil::MovementGraph random_strong_graph(std::size_t n, std::size_t extra, boil::Rng& rng) {
  std::vector<boil::Edge> edges;
  for (NodeId u = 0; u < n; ++u) edges.push_back({u, u, 1.0});
  if (n > 1) {
    for (NodeId u = 0; u < n; ++u) edges.push_back({u, static_cast<NodeId>((u + 1) % n), 1.0});
  }
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (const auto& e : edges) used[e.src][e.dst] = true;
  for (std::size_t k = 0; k < extra && n > 2; ++k) {
    const auto u = static_cast<NodeId>(rng.index(n));
    const auto v = static_cast<NodeId>(rng.index(n));
    if (used[u][v]) continue;
    used[u][v] = true;
    edges.push_back({u, v, 1.0});
  }
  return boil::MovementGraph(n, std::move(edges));
}

/// Random row-stochastic transitions with at least `min_self` on every self-loop.
inline boil::TransitionVector random_transitions(const boil::MovementGraph& graph, boil::Rng& rng,
                                                 double min_self = 0.0) {
  boil::TransitionVector p(graph.edge_count());
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto out = graph.out_edges(u);
    double total = 0.0;
    for (EdgeId e : out) total += (p[e] = 0.05 + rng.uniform());
    for (EdgeId e : out) p[e] /= total;
    const auto self = graph.self_loop(u);
    if (self && p[*self] < min_self) {
      const double rest = 1.0 - p[*self];
      for (EdgeId e : out) {
        if (e != *self) p[e] *= (1.0 - min_self) / rest;
      }
      p[*self] = min_self;
    }
  }
  return p;
}

/// Dense transition matrix M(u, v) = sum of P(u->v) over parallel edges.
inline Eigen::MatrixXd dense_matrix(const boil::TransitionVector& p, const boil::MovementGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) m(graph.edge(e).src, graph.edge(e).dst) += p[e];
  return m;
}

/// Stationary distribution from (I - P^T) pi = 0 with one row replaced by sum(pi) = 1.
inline std::vector<double> dense_stationary(const boil::TransitionVector& p, const boil::MovementGraph& graph) {
  const Eigen::MatrixXd m = dense_matrix(p, graph);
  const auto n = m.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - m.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

inline double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

/// Visibility map from dense rows; zeros are left out.
inline boil::VisibilityMap make_vis(std::size_t nodes, const std::vector<std::vector<double>>& rows) {
  boil::VisibilityMap vis(nodes);
  for (const auto& row : rows) {
    boil::SparseVector sparse;
    for (NodeId w = 0; w < row.size(); ++w) {
      if (row[w] != 0.0) sparse.push_back({w, row[w]});
    }
    vis.append_row(sparse);
  }
  return vis;
}

/// Entropy surrogate sum of -a ln a computed straight from the definition.
inline double surrogate(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) {
    if (v > 0.0) s -= v * std::log(v);
  }
  return s;
}

/// Open flat grid of the given size.
inline boil::GridSpec open_grid(int width, int height, int elevation = 0) {
  boil::GridSpec g;
  g.width = width;
  g.height = height;
  g.cells.assign(static_cast<std::size_t>(width * height), boil::Cell{boil::CellKind::Open, elevation});
  return g;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("boil-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// A graph with at most 3 nodes and 6 edges plus a handcrafted visibility table.
struct Toy {
  boil::MovementGraph graph;
  boil::VisibilityMap vis;
};

/// Ten small toys. Shapes: 3-ring with self-loops, 3-line with self-loops on the ends,
/// 2-node pair with self-loops and 2-node pair with one self-loop.
inline std::vector<Toy> toy_suite() {
  using Rows = std::vector<std::vector<double>>;
  auto ring = [] { return make_graph(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {2, 0}}); };
  auto line = [] { return make_graph(3, {{0, 0}, {2, 2}, {0, 1}, {1, 0}, {1, 2}, {2, 1}}); };
  auto pair = [] { return make_graph(2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}}); };
  auto lopsided = [] { return make_graph(2, {{0, 0}, {0, 1}, {1, 0}}); };
  std::vector<Toy> toys;
  auto add = [&](boil::MovementGraph g, const Rows& rows) {
    const std::size_t n = rows.front().size();
    toys.push_back({std::move(g), make_vis(n, rows)});
  };
  // Rows follow edge order; columns are the observable nodes.
  add(ring(), Rows{{0.9, 0.1}, {0.3, 0.6}, {0.0, 0.2}, {0.5, 0.5}, {0.2, 0.8}, {0.7, 0.0}});
  add(ring(), Rows{{0.4, 0.4}, {0.6, 0.1}, {0.1, 0.7}, {1.0, 0.25}, {0.0, 0.5}, {0.3, 0.3}});
  add(ring(), Rows{{0.5, 0.2, 0.1}, {0.1, 0.5, 0.2}, {0.2, 0.1, 0.5}, {0.3, 0.3, 0.0}, {0.0, 0.3, 0.3}, {0.3, 0.0, 0.3}});
  add(line(), Rows{{0.8, 0.3}, {0.1, 0.9}, {0.5, 0.5}, {0.6, 0.2}, {0.2, 0.6}, {0.3, 0.7}});
  add(line(), Rows{{0.25, 0.0}, {0.0, 0.25}, {0.75, 0.5}, {0.5, 0.75}, {0.6, 0.6}, {0.1, 0.4}});
  add(line(), Rows{{0.7, 0.2, 0.0}, {0.0, 0.2, 0.7}, {0.4, 0.4, 0.1}, {0.4, 0.4, 0.0}, {0.1, 0.4, 0.4}, {0.0, 0.4, 0.4}});
  add(pair(), Rows{{0.6, 0.3}, {0.2, 0.9}, {0.5, 0.5}, {0.4, 0.6}});
  add(pair(), Rows{{0.35, 0.1}, {0.15, 0.45}, {0.8, 0.2}, {0.3, 0.9}});
  add(lopsided(), Rows{{0.9, 0.2}, {0.4, 0.4}, {0.1, 0.6}});
  add(lopsided(), Rows{{0.3, 0.3}, {0.7, 0.1}, {0.2, 0.8}});
  return toys;
}

/// Coverage loss at the best point of a 0.01 grid over every node's transition simplex.
/// Grid entries of 0 are lifted to `floor` and renormalised, the same feasible set the optimiser uses.
inline double grid_search_loss(const boil::MovementGraph& graph, const boil::VisibilityMap& vis, int resolution = 100,
                               double floor = 1e-9) {
  const std::size_t n = graph.node_count();
  // Every node's simplex as a list of points on the grid.
  std::vector<std::vector<std::vector<double>>> points(n);
  for (NodeId u = 0; u < n; ++u) {
    const std::size_t k = graph.out_edges(u).size();
    std::vector<int> parts(k, 0);
    auto emit = [&](auto&& self, std::size_t i, int left) -> void {
      if (i + 1 == k) {
        parts[i] = left;
        std::vector<double> pt(k);
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) total += (pt[j] = std::max(parts[j] / double(resolution), floor));
        for (double& v : pt) v /= total;
        points[u].push_back(std::move(pt));
        return;
      }
      for (int c = 0; c <= left; ++c) {
        parts[i] = c;
        self(self, i + 1, left - c);
      }
    };
    emit(emit, 0, resolution);
  }
  std::vector<std::size_t> index(n, 0);
  boil::TransitionVector p(graph.edge_count());
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (NodeId u = 0; u < n; ++u) {
      const auto out = graph.out_edges(u);
      for (std::size_t j = 0; j < out.size(); ++j) p[out[j]] = points[u][index[u]][j];
    }
    const auto pi = dense_stationary(p, graph);
    std::vector<double> a(vis.node_count(), 0.0);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      const double pe = pi[graph.edge(e).src] * p[e];
      for (const auto& s : vis.row(e)) a[s.node] += pe * s.value;
    }
    best = std::min(best, surrogate(a));
    std::size_t u = 0;
    while (u < n && ++index[u] == points[u].size()) index[u++] = 0;
    if (u == n) break;
  }
  return best;
}

}  // namespace testing

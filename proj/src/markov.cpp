#include "boil/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "boil/errors.hpp"

namespace boil {

namespace {

constexpr double kRelaxation = 0.9;
// Normalisation entries relative to the smallest outflow on the diagonal.
constexpr double kNormalisationScale = 1e-3;
// Diagonal pivots are kept unless ten times smaller than the column maximum.
constexpr double kPivotThreshold = 0.1;

void check_sizes(const TransitionVector& p, const MovementGraph& graph) {
  if (p.size() != graph.edge_count()) {
    throw DimensionMismatch("transition vector has " + std::to_string(p.size()) + " entries, graph has " +
                            std::to_string(graph.edge_count()) + " edges");
  }
}

// y = pi M with M = (1 - damping) P + damping / n.
void apply_kernel(const TransitionVector& p, const MovementGraph& graph, double damping,
                  const std::vector<double>& pi, std::vector<double>& y) {
  const auto edges = graph.edges();
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) y[edges[e].dst] += pi[edges[e].src] * p[e];
  if (damping > 0.0) {
    const double teleport = damping / static_cast<double>(pi.size());
    for (double& v : y) v = (1.0 - damping) * v + teleport;
  }
}

}  // namespace

StationaryResult solve_stationary(const TransitionVector& p, const MovementGraph& graph,
                                  const StationaryOptions& options) {
  check_sizes(p, graph);
  const std::size_t n = graph.node_count();
  if (n == 0) throw ValidationError("empty graph");

  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  if (!options.start.empty()) {
    if (options.start.size() != n) throw DimensionMismatch("start vector has wrong length");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += (pi[i] = std::max(0.0, options.start[i]));
    if (total > 0.0) {
      for (double& v : pi) v /= total;
    } else {
      std::fill(pi.begin(), pi.end(), 1.0 / static_cast<double>(n));
    }
  }

  std::vector<double> y(n);
  double residual = 0.0;
  for (int it = 0; it <= options.max_iters; ++it) {
    apply_kernel(p, graph, options.damping, pi, y);
    residual = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::abs(y[i] - pi[i]);
      residual = std::max(residual, d);
      spread += d;
    }
    if (spread <= options.tol) return {StationaryDist(std::move(pi)), it, residual};
    if (it == options.max_iters) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += (pi[i] += kRelaxation * (y[i] - pi[i]));
    for (double& v : pi) v /= total;
  }
  throw NotConverged(options.max_iters, residual);
}

namespace {

// Sparse LU of the balance equations I - P^T with the row of one node
// replaced. Without `normalised` the row becomes pi(pin) = 1, which keeps the
// pattern of I - P^T for every pin, so one symbolic analysis serves all of
// them. With it the row becomes sum(pi) = 1, which stays well posed on nearly
// decomposable chains but has a dense row and a pattern per pin.
struct BalanceSystem {
  using Matrix = Eigen::SparseMatrix<double>;

  const MovementGraph* graph = nullptr;
  bool normalised = false;
  std::size_t pinned = std::numeric_limits<std::size_t>::max();
  // Node with the largest magnitude in the last solve; where the mass sits
  // when the system turns out to be near singular.
  std::size_t suspect = 0;
  Matrix a;
  // Position of each edge's coefficient in a.valuePtr(), or -1 when the edge
  // does not enter the matrix.
  std::vector<std::ptrdiff_t> slot;
  std::vector<std::ptrdiff_t> diagonal;
  std::vector<std::ptrdiff_t> normalisation;
  Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;

  void pin(std::size_t node) {
    const bool analysed = pinned != std::numeric_limits<std::size_t>::max();
    if (analysed && (node == pinned || !normalised)) {
      pinned = node;
      return;
    }
    pinned = node;
    const std::size_t n = graph->node_count();
    const auto r = static_cast<int>(node);
    std::vector<Eigen::Triplet<double>> pattern;
    for (std::size_t i = 0; i < n; ++i) {
      pattern.emplace_back(static_cast<int>(i), static_cast<int>(i), 0.0);
      if (normalised) pattern.emplace_back(r, static_cast<int>(i), 0.0);
    }
    for (const auto& e : graph->edges()) {
      if (e.src != e.dst && (!normalised || e.dst != node)) {
        pattern.emplace_back(static_cast<int>(e.dst), static_cast<int>(e.src), 0.0);
      }
    }
    a = Matrix(static_cast<int>(n), static_cast<int>(n));
    a.setFromTriplets(pattern.begin(), pattern.end());
    a.makeCompressed();

    auto locate = [&](std::size_t row, std::size_t col) -> std::ptrdiff_t {
      const auto* outer = a.outerIndexPtr();
      const auto* inner = a.innerIndexPtr();
      const auto* pos = std::lower_bound(inner + outer[col], inner + outer[col + 1], static_cast<int>(row));
      return pos - inner;
    };
    diagonal.resize(n);
    normalisation.assign(normalised ? n : 0, -1);
    for (std::size_t i = 0; i < n; ++i) {
      diagonal[i] = locate(i, i);
      if (normalised) normalisation[i] = locate(node, i);
    }
    slot.assign(graph->edge_count(), -1);
    for (EdgeId e = 0; e < graph->edge_count(); ++e) {
      const auto& edge = graph->edge(e);
      if (edge.src != edge.dst && (!normalised || edge.dst != node)) slot[e] = locate(edge.dst, edge.src);
    }
    lu.setPivotThreshold(kPivotThreshold);
    lu.analyzePattern(a);
  }

  // Returns false when the factorisation breaks down.
  bool solve(const TransitionVector& p, std::vector<double>& pi) {
    const std::size_t n = graph->node_count();
    double* values = a.valuePtr();
    std::fill(values, values + a.nonZeros(), 0.0);
    for (EdgeId e = 0; e < graph->edge_count(); ++e) {
      const Edge& edge = graph->edge(e);
      if (edge.src == edge.dst) continue;
      // Leaving mass goes on the diagonal as a sum of the outflows rather
      // than 1 - P(u->u), which cancels for nearly absorbing nodes.
      if (edge.src != pinned) values[diagonal[edge.src]] += p[e];
      if (edge.dst != pinned) values[slot[e]] -= p[e];
    }
    double scale = 1.0;
    if (normalised) {
      // Balance columns are diagonally dominant; a normalisation row below
      // every diagonal keeps the pivots on the diagonal for longer.
      double smallest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double d = values[diagonal[i]];
        if (i != pinned && d > 0.0) smallest = std::min(smallest, d);
      }
      if (std::isfinite(smallest)) scale = kNormalisationScale * smallest;
      for (std::size_t i = 0; i < n; ++i) values[normalisation[i]] = scale;
    } else {
      values[diagonal[pinned]] = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    rhs[static_cast<Eigen::Index>(pinned)] = scale;
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return false;
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(rhs - a * x);
    Eigen::Index largest = 0;
    x.cwiseAbs().maxCoeff(&largest);
    suspect = static_cast<std::size_t>(largest);
    double total = 0.0;
    for (std::size_t u = 0; u < n; ++u) total += (pi[u] = std::max(0.0, x[static_cast<Eigen::Index>(u)]));
    if (!std::isfinite(total) || total <= 0.0) return false;
    for (double& v : pi) v /= total;
    return true;
  }
};

}  // namespace

struct StationarySolver::Impl {
  const MovementGraph* graph = nullptr;
  StationaryOptions options;
  BalanceSystem pinned;
  BalanceSystem normalised;
  // Last solution that met the residual bound.
  std::vector<double> last;

  // Tries up to `attempts` rows of `system`. The first is `first`; after a
  // solve that misses the bound the row moves to argmax |x|, and after a
  // breakdown to the heaviest untried node of the last good solution.
  bool attempt(BalanceSystem& system, std::size_t first, int attempts, const TransitionVector& p,
               std::vector<double>& pi, double& residual) {
    const std::size_t n = graph->node_count();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!last.empty()) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return last[a] > last[b]; });
    }
    std::vector<bool> tried(n, false);
    system.pin(first);
    for (int k = 0; k < attempts; ++k) {
      tried[system.pinned] = true;
      const bool solved = system.solve(p, pi);
      if (solved) {
        residual = global_balance_residual(p, StationaryDist(pi), *graph);
        if (residual <= options.tol) return true;
      }
      std::size_t next = n;
      if (solved && !tried[system.suspect]) {
        next = system.suspect;
      } else {
        const auto it = std::find_if(order.begin(), order.end(), [&](std::size_t u) { return !tried[u]; });
        if (it != order.end()) next = *it;
      }
      if (next == n) break;
      system.pin(next);
    }
    return false;
  }
};

StationarySolver::StationarySolver(const MovementGraph& graph, StationaryOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->graph = &graph;
  impl_->options = options;
  impl_->options.start = {};
  if (graph.node_count() == 0) throw ValidationError("empty graph");
  impl_->pinned.graph = &graph;
  impl_->normalised.graph = &graph;
  impl_->normalised.normalised = true;
}

StationarySolver::~StationarySolver() = default;
StationarySolver::StationarySolver(StationarySolver&&) noexcept = default;
StationarySolver& StationarySolver::operator=(StationarySolver&&) noexcept = default;

StationaryResult StationarySolver::solve(const TransitionVector& p) {
  const MovementGraph& graph = *impl_->graph;
  check_sizes(p, graph);
  const std::size_t n = graph.node_count();
  if (n == 1) return {StationaryDist(1, 1.0), 0, 0.0};

  // Fixing pi(u) = 1 is best conditioned at the heaviest node.
  const std::size_t heaviest =
      impl_->last.empty()
          ? n - 1
          : static_cast<std::size_t>(std::max_element(impl_->last.begin(), impl_->last.end()) - impl_->last.begin());
  std::vector<double> pi(n, 0.0);
  double residual = std::numeric_limits<double>::infinity();
  const bool solved = impl_->attempt(impl_->pinned, heaviest, 3, p, pi, residual) ||
                      impl_->attempt(impl_->normalised,
                                     impl_->normalised.pinned < n ? impl_->normalised.pinned : heaviest, 3, p, pi,
                                     residual);
  if (solved) {
    impl_->last = pi;
    return {StationaryDist(std::move(pi)), 0, residual};
  }
  StationaryOptions polish = impl_->options;
  if (impl_->last.empty()) {
    std::fill(pi.begin(), pi.end(), 1.0 / static_cast<double>(n));
  } else {
    pi = impl_->last;
  }
  polish.start = pi;
  return solve_stationary(p, graph, polish);
}

double global_balance_residual(const TransitionVector& p, const StationaryDist& pi,
                               const MovementGraph& graph) {
  check_sizes(p, graph);
  std::vector<double> y(graph.node_count());
  apply_kernel(p, graph, 0.0, pi.values(), y);
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs(y[i] - pi[i]));
  return r;
}

TransitionVector uniform_transitions(const MovementGraph& graph) {
  TransitionVector p(graph.edge_count());
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const auto out = graph.out_edges(u);
    for (EdgeId e : out) p[e] = 1.0 / static_cast<double>(out.size());
  }
  return p;
}

double row_sum_error(const TransitionVector& p, const MovementGraph& graph) {
  check_sizes(p, graph);
  double worst = 0.0;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    double s = 0.0;
    for (EdgeId e : graph.out_edges(u)) s += p[e];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

EdgeDistribution edge_distribution(const TransitionVector& p, const StationaryDist& pi,
                                   const MovementGraph& graph) {
  check_sizes(p, graph);
  if (pi.size() != graph.node_count()) throw DimensionMismatch("stationary vector has wrong length");
  EdgeDistribution out(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) out[e] = pi[graph.edge(e).src] * p[e];
  return out;
}

EdgeDistribution occupancy_distribution(const TransitionVector& p, const StationaryDist& pi,
                                        const MovementGraph& graph) {
  EdgeDistribution out = edge_distribution(p, pi, graph);
  bool unit = true;
  for (const auto& e : graph.edges()) unit = unit && e.traversal_time == 1.0;
  if (unit) return out;
  double total = 0.0;
  for (EdgeId e = 0; e < out.size(); ++e) total += (out[e] *= graph.edge(e).traversal_time);
  for (double& v : out) v /= total;
  return out;
}

std::pair<StationaryDist, TransitionVector> decompose_edge_distribution(const EdgeDistribution& edges,
                                                                        const MovementGraph& graph) {
  if (edges.size() != graph.edge_count()) throw DimensionMismatch("edge distribution has wrong length");
  StationaryDist pi(graph.node_count());
  TransitionVector p(graph.edge_count());
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    double mass = 0.0;
    for (EdgeId e : graph.out_edges(u)) mass += edges[e];
    if (!(mass > 0.0)) throw ZeroMassNode(u);
    pi[u] = mass;
    for (EdgeId e : graph.out_edges(u)) p[e] = edges[e] / mass;
  }
  return {std::move(pi), std::move(p)};
}

double VorticityMatrix::operator()(NodeId u, NodeId v) const {
  if (const auto e = graph_->find_edge(u, v)) return per_edge_[*e];
  if (const auto r = graph_->find_edge(v, u)) return -per_edge_[*r];
  return 0.0;
}

VorticityMatrix vorticity(const TransitionVector& p, const StationaryDist& pi, const MovementGraph& graph) {
  check_sizes(p, graph);
  std::vector<double> gamma(graph.edge_count(), 0.0);
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edge(e);
    if (edge.src == edge.dst) continue;
    const double forward = pi[edge.src] * p[e];
    const auto rev = graph.find_edge(edge.dst, edge.src);
    const double backward = rev ? pi[edge.dst] * p[*rev] : 0.0;
    gamma[e] = forward - backward;
  }
  return VorticityMatrix(&graph, std::move(gamma));
}

std::vector<VorticityViolation> check_vorticity_constraint(const VorticityMatrix& gamma,
                                                           const StationaryDist& pi,
                                                           const TransitionVector& proposal,
                                                           const MovementGraph& graph, double tolerance) {
  check_sizes(proposal, graph);
  std::vector<VorticityViolation> out;
  auto check = [&](NodeId u, NodeId v) {
    const auto fwd = graph.find_edge(u, v);
    const auto rev = graph.find_edge(v, u);
    const double upper = fwd ? pi[u] * proposal[*fwd] : 0.0;
    const double lower = rev ? -pi[v] * proposal[*rev] : 0.0;
    const double g = gamma(u, v);
    const double margin = std::max(g - upper, lower - g);
    if (margin > tolerance) out.push_back({u, v, g, lower, upper, margin});
  };
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edge(e);
    if (edge.src == edge.dst || graph.find_edge(edge.src, edge.dst) != e) continue;
    check(edge.src, edge.dst);
    // Pairs that exist only in the reverse direction.
    if (!graph.find_edge(edge.dst, edge.src)) check(edge.dst, edge.src);
  }
  return out;
}

}  // namespace boil

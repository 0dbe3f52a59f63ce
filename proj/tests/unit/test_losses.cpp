#include <doctest.h>

#include <cmath>

#include "boil/errors.hpp"
#include "boil/losses.hpp"
#include "boil/markov.hpp"
#include "support.hpp"

using namespace boil;

TEST_CASE("coverage loss on hand-computed inputs") {
  const auto single = testing::make_vis(1, {{1.0}});
  CHECK(coverage_loss(EdgeDistribution(std::vector<double>{1.0}), single) == 0.0);

  const auto half = testing::make_vis(1, {{1.0}, {0.0}});
  const EdgeDistribution p(std::vector<double>{0.5, 0.5});
  CHECK(coverage_loss(p, half) == doctest::Approx(0.34657359027997264).epsilon(1e-14));

  CHECK_THROWS_AS(coverage_loss(EdgeDistribution(std::vector<double>{1.0}), half), DimensionMismatch);
}

TEST_CASE("coverage loss is zero whenever every A(w) is 0 or 1") {
  const auto vis = testing::make_vis(4, {{1.0, 0.0, 1.0, 0.0}, {1.0, 0.0, 1.0, 0.0}, {0.5, 1.0, 0.0, 0.0}});
  const EdgeDistribution p(std::vector<double>{0.3, 0.7, 0.0});
  CHECK(coverage_loss(p, vis) == 0.0);
}

TEST_CASE("coverage loss equals the surrogate of the expected visibility") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> rows(7, std::vector<double>(5));
    for (auto& r : rows) {
      for (double& v : r) v = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
    }
    const auto vis = testing::make_vis(5, rows);
    std::vector<double> weights(7);
    double total = 0.0;
    for (double& w : weights) total += (w = rng.uniform());
    for (double& w : weights) w /= total;
    std::vector<double> a(5, 0.0);
    for (std::size_t e = 0; e < 7; ++e) {
      for (std::size_t w = 0; w < 5; ++w) a[w] += weights[e] * rows[e][w];
    }
    const EdgeDistribution p(weights);
    CHECK(coverage_loss(p, vis) == doctest::Approx(testing::surrogate(a)).epsilon(1e-13));
    const std::vector<NodeId> all{0, 1, 2, 3, 4};
    CHECK(patrolling_loss(p, vis, all) == doctest::Approx(coverage_loss(p, vis)).epsilon(1e-13));
    const std::vector<NodeId> one{2};
    CHECK(patrolling_loss(p, vis, one) == doctest::Approx(testing::surrogate({a[2]})).epsilon(1e-13));
  }
}

TEST_CASE("patrolling loss") {
  const auto vis = testing::make_vis(2, {{1.0, 0.5}});
  const EdgeDistribution p(std::vector<double>{1.0});
  const std::vector<NodeId> seen{0};
  CHECK(patrolling_loss(p, vis, seen) == 0.0);
  CHECK_THROWS_AS(patrolling_loss(p, vis, std::vector<NodeId>{}), EmptyPatrolSet);
  CHECK_THROWS_AS(LossSpec::patrolling(vis, {}).validate(testing::make_graph(2, {{0, 0}})), EmptyPatrolSet);
}

TEST_CASE("reachability loss reduces to coverage under substitution") {
  const auto vis = testing::make_vis(3, {{1.0, 0.2, 0.0}, {0.0, 0.5, 0.7}});
  const EdgeDistribution p(std::vector<double>{0.4, 0.6});
  CHECK(reachability_loss(p, vis) == coverage_loss(p, vis));

  const auto flat = testing::make_vis(3, {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}});
  const double expected = -3.0 * 0.5 * std::log(0.5);
  CHECK(reachability_loss(p, flat) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(reachability_loss(EdgeDistribution(std::vector<double>{1.0, 0.0}), flat) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("reachability map from shortest travel times") {
  // Line 0 - 1 - 2 - 3 with self-loops.
  const auto g = testing::make_graph(4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}});
  const std::vector<double> horizon(4, 2.0);
  const auto reach = build_reachability_map(g, horizon);
  // Edge 0 -> 1 ends at node 1; node 3 is 2 hops further.
  const EdgeId e = *g.find_edge(0, 1);
  auto logistic = [](double t, double h) { return 1.0 / (1.0 + std::exp(t - h)); };
  CHECK(reach.value(e, 1) == doctest::Approx(logistic(0.5, 2.0)).epsilon(1e-14));
  CHECK(reach.value(e, 3) == doctest::Approx(logistic(2.5, 2.0)).epsilon(1e-14));
  CHECK(reach.value(e, 0) == doctest::Approx(logistic(1.5, 2.0)).epsilon(1e-14));
  for (EdgeId f = 0; f < g.edge_count(); ++f) {
    for (const auto& s : reach.row(f)) {
      CHECK(s.value > 0.0);
      CHECK(s.value < 1.0);
    }
  }

  // Non-unit traversal times use weighted distances.
  std::vector<Edge> edges{{0, 0, 1.0}, {1, 1, 1.0}, {0, 1, 3.0}, {1, 0, 3.0}};
  const MovementGraph slow(2, edges);
  const auto r2 = build_reachability_map(slow, std::vector<double>(2, 4.0));
  CHECK(r2.value(2, 0) == doctest::Approx(logistic(1.5 + 3.0, 4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(build_reachability_map(slow, std::vector<double>(3, 1.0)), DimensionMismatch);
}

TEST_CASE("loss spec dispatch") {
  const auto g = testing::make_graph(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto vis = testing::make_vis(2, {{1.0, 0.0}, {0.5, 0.5}, {0.5, 0.5}, {0.0, 1.0}});
  const EdgeDistribution p(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(LossSpec::coverage(vis)(p) == coverage_loss(p, vis));
  CHECK(LossSpec::patrolling(vis, {1})(p) == patrolling_loss(p, vis, std::vector<NodeId>{1}));
  CHECK(LossSpec::reachability(vis)(p) == reachability_loss(p, vis));
  CHECK_NOTHROW(LossSpec::coverage(vis).validate(g));
  const auto short_vis = testing::make_vis(2, {{1.0, 0.0}});
  CHECK_THROWS_AS(LossSpec::coverage(short_vis).validate(g), DimensionMismatch);
  CHECK_THROWS_AS(LossSpec::patrolling(vis, {5}).validate(g), ValidationError);
}

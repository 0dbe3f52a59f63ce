#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace boil {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Dense vector of probabilities indexed by node or edge handles. The tag
/// keeps transition, stationary and edge distributions from being mixed up.
template <class Tag>
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit ProbabilityVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

  bool operator==(const ProbabilityVector&) const = default;

 private:
  std::vector<double> values_;
};

struct TransitionTag;
struct StationaryTag;
struct EdgeTag;

/// P(u->v) per edge; each node's outgoing block sums to one.
using TransitionVector = ProbabilityVector<TransitionTag>;
/// pi(u) per node.
using StationaryDist = ProbabilityVector<StationaryTag>;
/// P((u,v)) per edge; sums to one over all edges.
using EdgeDistribution = ProbabilityVector<EdgeTag>;

}  // namespace boil

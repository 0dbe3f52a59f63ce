#pragma once

#include <span>
#include <vector>

#include "boil/simulator.hpp"
#include "boil/types.hpp"
#include "boil/visibility.hpp"

namespace boil {

/// 1/2 sum |mu - nu|. Throws SupportMismatch for different lengths and
/// ValidationError when either side is not normalised within 1e-9.
double total_variation(std::span<const double> mu, std::span<const double> nu);

struct Checkpoint {
  int step = 0;
  double tv = 0.0;
};

using ConvergenceSeries = std::vector<Checkpoint>;

/// 1, 2, ... growing by `ratio` (at least one step each time), always ending
/// at `steps`.
std::vector<int> geometric_checkpoints(int steps, double ratio = 1.1);

/// TV between the empirical edge distribution of each prefix and `target`.
ConvergenceSeries convergence_series(const Trace& trace, const EdgeDistribution& target,
                                     std::span<const int> checkpoints);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Histogram of per-node visibility counts with `bins` uniform bins over
/// [lo, hi]; mean, min and max of each bin's node count across runs. When
/// hi <= lo the range is taken from the data.
std::vector<HistogramBin> visibility_histogram(const std::vector<Trace>& traces, int bins = 50, double lo = 0.0,
                                               double hi = 0.0);

/// Interquartile range divided by the median (linear interpolation).
double quartile_spread(std::span<const double> values);

struct BoundRow {
  NodeId node = 0;
  double lower = 0.0;     // T sum_e P(e) V(e)(w)
  double observed = 0.0;  // steps in which w was seen by someone
  double upper = 0.0;     // n T sum_e P(e) V(e)(w)
  double cross = 0.0;     // sum over steps of agent pairs seeing w
  double expected = 0.0;  // expected value of `observed` given the edges taken
  double sigma = 0.0;
  bool tested = false;
  bool violated = false;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  std::size_t tested = 0;
  std::size_t violations = 0;
};

/// Checks lower - k sigma <= observed <= upper + k sigma for nodes whose
/// expected count is at least `min_expected`, and on every node the exact
/// pairwise inequality sum_i X_i <= observed + cross.
BoundReport theorem1_bound_report(const Trace& trace, const VisibilityMap& vis, double sigmas = 4.0,
                                  double min_expected = 10.0);

struct MarkerStat {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and sample variance of each marker's count across runs.
std::vector<MarkerStat> marker_summary(const std::vector<Trace>& traces);

}  // namespace boil

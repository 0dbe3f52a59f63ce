#include "boil/metrics.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

#include "boil/errors.hpp"

namespace boil {

double total_variation(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) {
    throw SupportMismatch("distributions have " + std::to_string(mu.size()) + " and " + std::to_string(nu.size()) +
                          " entries");
  }
  const double smu = std::accumulate(mu.begin(), mu.end(), 0.0);
  const double snu = std::accumulate(nu.begin(), nu.end(), 0.0);
  if (std::abs(smu - 1.0) > 1e-9 || std::abs(snu - 1.0) > 1e-9) {
    throw ValidationError("total variation needs normalised distributions");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) d += std::abs(mu[i] - nu[i]);
  return std::clamp(0.5 * d, 0.0, 1.0);
}

std::vector<int> geometric_checkpoints(int steps, double ratio) {
  if (steps < 1) throw ValidationError("need at least one step");
  if (!(ratio > 1.0)) throw ValidationError("checkpoint ratio must exceed 1");
  std::vector<int> out;
  double x = 1.0;
  int last = 0;
  while (last < steps) {
    int next = std::max(last + 1, static_cast<int>(std::floor(x)));
    next = std::min(next, steps);
    out.push_back(next);
    last = next;
    x *= ratio;
  }
  return out;
}

ConvergenceSeries convergence_series(const Trace& trace, const EdgeDistribution& target,
                                     std::span<const int> checkpoints) {
  if (target.size() != trace.edge_counts.size()) throw SupportMismatch("target does not match trace edges");
  ConvergenceSeries series;
  std::vector<double> counts(target.size(), 0.0);
  std::vector<double> empirical(target.size());
  const std::size_t agents = static_cast<std::size_t>(trace.n_agents);
  std::size_t done = 0;
  int prev = 0;
  for (int step : checkpoints) {
    if (step <= prev || step > trace.steps) throw ValidationError("checkpoints must increase within the trace");
    prev = step;
    const std::size_t end = static_cast<std::size_t>(step) * agents;
    for (; done < end; ++done) counts[trace.edge_sequence[done]] += 1.0;
    for (std::size_t e = 0; e < counts.size(); ++e) empirical[e] = counts[e] / static_cast<double>(end);
    series.push_back({step, total_variation(empirical, target.span())});
  }
  return series;
}

std::vector<HistogramBin> visibility_histogram(const std::vector<Trace>& traces, int bins, double lo, double hi) {
  if (bins < 1) throw ValidationError("need at least one bin");
  if (traces.empty()) return {};
  if (hi <= lo) {
    lo = 0.0;
    hi = 0.0;
    for (const auto& t : traces) {
      for (double c : t.node_visibility_counts) hi = std::max(hi, c);
    }
    if (hi <= lo) hi = lo + 1.0;
  }
  const double width = (hi - lo) / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].lo = lo + b * width;
    out[static_cast<std::size_t>(b)].hi = lo + (b + 1) * width;
  }
  std::vector<double> counts(out.size());
  for (std::size_t r = 0; r < traces.size(); ++r) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (double c : traces[r].node_visibility_counts) {
      auto b = static_cast<long>(std::floor((c - lo) / width));
      b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
      counts[static_cast<std::size_t>(b)] += 1.0;
    }
    for (std::size_t b = 0; b < out.size(); ++b) {
      auto& bin = out[b];
      bin.mean += counts[b] / static_cast<double>(traces.size());
      bin.min = r == 0 ? counts[b] : std::min(bin.min, counts[b]);
      bin.max = r == 0 ? counts[b] : std::max(bin.max, counts[b]);
    }
  }
  return out;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (pos - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

}  // namespace

double quartile_spread(std::span<const double> values) {
  if (values.empty()) throw ValidationError("no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double median = quantile(sorted, 0.5);
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  if (median == 0.0) return iqr == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return iqr / median;
}

BoundReport theorem1_bound_report(const Trace& trace, const VisibilityMap& vis, double sigmas,
                                  double min_expected) {
  if (vis.row_count() != trace.edge_counts.size()) throw SupportMismatch("visibility does not match trace edges");
  const std::size_t n = vis.node_count();
  std::vector<double> mass(n, 0.0);
  for (EdgeId e = 0; e < trace.edge_counts.size(); ++e) {
    if (trace.edge_counts[e] == 0) continue;
    const double c = static_cast<double>(trace.edge_counts[e]);
    for (const auto& s : vis.row(e)) mass[s.node] += c * s.value;
  }

  BoundReport report;
  const double agents = static_cast<double>(trace.n_agents);
  for (NodeId w = 0; w < n; ++w) {
    BoundRow row;
    row.node = w;
    row.upper = mass[w];
    row.lower = mass[w] / agents;
    row.observed = trace.node_visibility_counts[w];
    row.cross = trace.pair_visibility_counts[w];
    row.expected = trace.expected_visibility_counts[w];
    row.sigma = std::sqrt(trace.visibility_variance[w]);

    double individual = 0.0;
    for (const auto& per_agent : trace.per_agent_visibility_counts) individual += per_agent[w];
    const double slack = 1e-9 * std::max(1.0, individual);
    bool bad = individual > row.observed + row.cross + slack;

    row.tested = row.expected >= min_expected;
    if (row.tested) {
      ++report.tested;
      const double band = sigmas * row.sigma;
      bad = bad || row.observed < row.lower - band || row.observed > row.upper + band;
    }
    row.violated = bad;
    if (bad) ++report.violations;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<MarkerStat> marker_summary(const std::vector<Trace>& traces) {
  if (traces.empty()) return {};
  const std::size_t markers = traces.front().marker_counts.size();
  std::vector<MarkerStat> out(markers);
  const double runs = static_cast<double>(traces.size());
  for (std::size_t m = 0; m < markers; ++m) {
    for (const auto& t : traces) out[m].mean += t.marker_counts[m] / runs;
    if (traces.size() > 1) {
      for (const auto& t : traces) {
        const double d = t.marker_counts[m] - out[m].mean;
        out[m].variance += d * d / (runs - 1.0);
      }
    }
  }
  return out;
}

}  // namespace boil

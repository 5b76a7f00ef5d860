// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include "pcct/error.hpp"
#include "pcct/pipeline.hpp"

namespace pcct::pipeline {

double percentile_of(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::argument, "percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw Error(ErrorKind::argument, "percentile must lie in [0, 100]");
  const double h = static_cast<double>(sorted.size() - 1) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Histogram fd_histogram(std::span<const double> sorted) {
  if (sorted.empty()) throw Error(ErrorKind::argument, "histogram of an empty sample");
  const double lo = sorted.front();
  const double hi = sorted.back();
  const auto n = static_cast<double>(sorted.size());
  Histogram h;
  if (!(hi > lo)) {
    h.edges = {lo - 0.5, lo + 0.5};
    h.densities = {1.0};
    return h;
  }
  const double iqr = percentile_of(sorted, 75.0) - percentile_of(sorted, 25.0);
  std::size_t bins;
  if (iqr > 0.0) {
    const double width = 2.0 * iqr / std::cbrt(n);
    bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  } else {
    // Degenerate quartiles: fall back to Sturges.
    bins = static_cast<std::size_t>(std::ceil(std::log2(n) + 1.0));
  }
  bins = std::clamp<std::size_t>(bins, 1, 10000);
  const double width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.edges.back() = hi;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : sorted) {
    auto k = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(k, bins - 1)]++;
  }
  h.densities.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    h.densities[k] = static_cast<double>(counts[k]) / (n * (h.edges[k + 1] - h.edges[k]));
  }
  return h;
}

EmpiricalStats empirical_stats(std::span<const double> samples, double fct, double percentile) {
  if (samples.empty()) throw Error(ErrorKind::argument, "empirical statistics of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (std::isnan(v)) throw Error(ErrorKind::argument, "sample contains NaN");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  EmpiricalStats s;
  // Shifted by the smallest value so identical samples give exactly zero variance.
  const double shift = sorted.front();
  double sum = 0.0;
  for (double v : sorted) sum += v - shift;
  const double mean_shifted = sum / n;
  s.mean = shift + mean_shifted;
  double ss = 0.0;
  for (double v : sorted) ss += (v - shift - mean_shifted) * (v - shift - mean_shifted);
  s.variance = sorted.size() > 1 ? ss / (n - 1.0) : 0.0;

  const auto first_stable = std::lower_bound(sorted.begin(), sorted.end(), fct);
  s.probability_of_stability = static_cast<double>(sorted.end() - first_stable) / n;
  s.percentile_value = percentile_of(sorted, percentile);
  s.histogram = fd_histogram(sorted);

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    s.cdf.x.push_back(sorted[i]);
    s.cdf.p.push_back(static_cast<double>(i + 1) / n);
  }
  return s;
}

}  // namespace pcct::pipeline

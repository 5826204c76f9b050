// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_STATS_HPP
#define QCTSP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qctsp/rng.hpp"

namespace qctsp {

// rho = C_quantum / C_classical
inline double approximation_ratio(double c_quantum, double c_classical) {
  if (!(c_classical > 0.0))
    throw std::invalid_argument("approximation_ratio: classical cost must be positive");
  return c_quantum / c_classical;
}

// Delta[%] = (rho - 1) * 100; negative values beat the classical baseline.
inline double percent_gap(double rho) {
  if (!std::isfinite(rho))
    throw std::invalid_argument("percent_gap: rho must be finite");
  return (rho - 1.0) * 100.0;
}

struct SummaryStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double sd = 0.0; // sample, n-1 denominator
  double ci_lo = 0.0;  // 95% bootstrap CI of the median
  double ci_hi = 0.0;
  std::size_t samples = 0;
};

namespace detail {

// Linear interpolation between order statistics (the numpy default).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

}  // namespace detail

inline SummaryStats summarize(const std::vector<double>& samples,
                              Rng& rng, int bootstrap_resamples = 10000) {
  if (samples.empty()) throw std::invalid_argument("summarize: empty input");
  if (bootstrap_resamples < 1)
    throw std::invalid_argument("summarize: bootstrap_resamples must be >= 1");

  SummaryStats s;
  s.samples = samples.size();

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  s.median = detail::quantile_sorted(sorted, 0.5);
  s.q1 = detail::quantile_sorted(sorted, 0.25);
  s.q3 = detail::quantile_sorted(sorted, 0.75);
  s.iqr = s.q3 - s.q1;

  if (samples.size() > 1) {
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    double acc = 0.0;
    for (double x : samples) acc += (x - mean) * (x - mean);
    s.sd = std::sqrt(acc / static_cast<double>(samples.size() - 1));
  }

  std::vector<double> medians(static_cast<std::size_t>(bootstrap_resamples));
  std::vector<double> resample(samples.size());
  for (auto& m : medians) {
    for (auto& x : resample)
      x = samples[static_cast<std::size_t>(rng.next_below(samples.size()))];
    m = detail::median_inplace(resample);
  }
  std::sort(medians.begin(), medians.end());
  s.ci_lo = detail::quantile_sorted(medians, 0.025);
  s.ci_hi = detail::quantile_sorted(medians, 0.975);
  return s;
}

}  // namespace qctsp

#endif  // QCTSP_STATS_HPP

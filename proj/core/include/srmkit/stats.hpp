#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace srmkit::stats {

// Percentile bootstrap interval for the mean of a sample.
struct BootstrapCi {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  int resamples = 0;
  // Set when the interval has zero width because the sample cannot vary
  // (one observation, or all observations equal).
  bool degenerate = false;
};

inline constexpr double kDefaultLevel = 0.95;
inline constexpr int kDefaultResamples = 10000;

double mean(std::span<const double> x);

/// Sample Pearson correlation, clamped to [-1, 1].
double pearson(std::span<const double> x, std::span<const double> y);

/// Fractional (1-based) ranks; tied values share the average of their ranks.
std::vector<double> fractional_ranks(std::span<const double> x);

/// Pearson correlation of fractional ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Resamples `samples` with replacement `resamples` times, takes the mean of
/// each resample, and returns the (1-level)/2 and 1-(1-level)/2 quantiles of
/// those means (linear interpolation between order statistics). `mean` is the
/// mean of the original sample.
BootstrapCi bootstrap_ci(std::span<const double> samples,
                         double level = kDefaultLevel,
                         int resamples = kDefaultResamples,
                         std::uint64_t seed = 0);

/// Linear-interpolation quantile of an ascending-sorted sample, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

}  // namespace srmkit::stats

#include "srmkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "srmkit/errors.hpp"

namespace srmkit::stats {
namespace {

void require_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "vectors have lengths " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kLengthMismatch,
                "correlation needs at least 2 observations");
  }
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::kEmptyInput, "mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kZeroVariance,
                std::string(sxx == 0.0 ? "first" : "second") +
                    " vector is constant; correlation undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // positions i..j-1 hold one tie group; 1-based ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyInput, "quantile of empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapCi bootstrap_ci(std::span<const double> samples, double level,
                         int resamples, std::uint64_t seed) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyInput, "bootstrap_ci needs at least one sample");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "bootstrap level must lie in (0, 1)");
  }
  if (resamples < 1) {
    throw Error(ErrorCode::kInvalidSpec, "bootstrap needs resamples >= 1");
  }

  BootstrapCi ci;
  ci.level = level;
  ci.resamples = resamples;
  ci.mean = mean(samples);

  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  if (*min_it == *max_it) {
    ci.lo = ci.hi = ci.mean = *min_it;
    ci.degenerate = true;
    return ci;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += samples[pick(rng)];
    m = sum / static_cast<double>(samples.size());
  }
  std::sort(means.begin(), means.end());

  const double alpha = 1.0 - level;
  // Means of resamples can round a hair outside the sample range.
  ci.lo = std::clamp(sorted_quantile(means, alpha / 2.0), *min_it, *max_it);
  ci.hi = std::clamp(sorted_quantile(means, 1.0 - alpha / 2.0), *min_it, *max_it);
  return ci;
}

}  // namespace srmkit::stats

#include "srmkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "srmkit/errors.hpp"

namespace srmkit::stats {
namespace {

// Brute-force oracle: rank = 1 + #smaller + (#ties excluding self) / 2, then
// textbook Pearson on the ranks.
double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double smaller = 0, ties = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) smaller += 1;
        if (j != i && v[j] == v[i]) ties += 1;
      }
      r[i] = 1 + smaller + ties / 2;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += rx[i]; sy += ry[i];
    sxy += rx[i] * ry[i]; sxx += rx[i] * rx[i]; syy += ry[i] * ry[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, bool coarse = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = coarse ? std::round(2 * normal(rng)) : normal(rng);
  return v;
}

TEST(Pearson, IdentityAndAffine) {
  const std::vector<double> x{0.3, -1.2, 4.0, 2.2, 0.0};
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return -2 * v + 3; });
  EXPECT_NEAR(pearson(x, x), 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, y), -1.0, 1e-12);
}

TEST(Pearson, HandComputedFixture) {
  // deviations (-1,0,1) and (-1,1,0): sum of products 1, sum of squares 2
  EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}), 0.5, 1e-12);
}

TEST(Pearson, SymmetricAndScaleInvariant) {
  const auto x = random_vector(40, 1);
  const auto y = random_vector(40, 2);
  const double r = pearson(x, y);
  EXPECT_EQ(r, pearson(y, x));
  std::vector<double> scaled(x.size()), flipped(x.size());
  std::transform(x.begin(), x.end(), scaled.begin(), [](double v) { return 7.5 * v - 2; });
  std::transform(x.begin(), x.end(), flipped.begin(), [](double v) { return -0.5 * v; });
  EXPECT_NEAR(pearson(scaled, y), r, 1e-12);
  EXPECT_NEAR(pearson(flipped, y), -r, 1e-12);
}

TEST(Pearson, Errors) {
  try {
    pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVariance);
  }
  try {
    pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{2}), Error);
}

TEST(Spearman, MonotoneAndReversed) {
  const auto x = random_vector(30, 3);
  std::vector<double> cubed(x.size()), reversed(x.size());
  std::transform(x.begin(), x.end(), cubed.begin(), [](double v) { return v * v * v + 1; });
  std::transform(x.begin(), x.end(), reversed.begin(), [](double v) { return -std::exp(v); });
  EXPECT_NEAR(spearman(x, cubed), 1.0, 1e-12);
  EXPECT_NEAR(spearman(x, reversed), -1.0, 1e-12);
}

TEST(Spearman, HandComputedFixture) {
  // ranks (1,2,3,4) vs (1,3,2,4): sum d^2 = 2, 1 - 6*2/(4*15) = 0.8
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8,
              1e-12);
}

TEST(Spearman, AverageRanksForTies) {
  const auto r = fractional_ranks(std::vector<double>{10, 20, 10, 30, 20, 20});
  EXPECT_EQ(r, (std::vector<double>{1.5, 4, 1.5, 6, 4, 4}));
}

TEST(Spearman, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const bool coarse = seed % 2 == 0;  // coarse vectors carry many ties
    const auto x = random_vector(25, 10 + seed, coarse);
    const auto y = random_vector(25, 500 + seed, coarse);
    EXPECT_NEAR(spearman(x, y), oracle_spearman(x, y), 1e-12) << "seed " << seed;
  }
}

TEST(Spearman, InvariantUnderIncreasingTransforms) {
  const auto x = random_vector(60, 4);
  const auto y = random_vector(60, 5);
  std::vector<double> tx(x.size());
  std::transform(x.begin(), x.end(), tx.begin(), [](double v) { return std::atan(v) * 9; });
  EXPECT_NEAR(spearman(tx, y), spearman(x, y), 1e-12);
}

TEST(BootstrapCi, AllEqualIsZeroWidth) {
  const std::vector<double> same(12, 0.37);
  const auto ci = bootstrap_ci(same, 0.95, 1000, 1);
  EXPECT_EQ(ci.lo, 0.37);
  EXPECT_EQ(ci.hi, 0.37);
  EXPECT_EQ(ci.mean, 0.37);
  EXPECT_TRUE(ci.degenerate);
}

TEST(BootstrapCi, SingleSampleIsDegenerate) {
  const auto ci = bootstrap_ci(std::vector<double>{0.9}, 0.95, 100, 3);
  EXPECT_TRUE(ci.degenerate);
  EXPECT_EQ(ci.lo, 0.9);
  EXPECT_EQ(ci.hi, 0.9);
}

TEST(BootstrapCi, TwoPointGolden) {
  // resample means of {0,1} take 0, 0.5, 1 with probability 1/4, 1/2, 1/4, so
  // the 2.5% and 97.5% quantiles of 10000 draws sit at 0 and 1
  const auto ci = bootstrap_ci(std::vector<double>{0, 1}, 0.95, 10000, 2024);
  EXPECT_EQ(ci.mean, 0.5);
  EXPECT_EQ(ci.lo, 0.0);
  EXPECT_EQ(ci.hi, 1.0);
  EXPECT_FALSE(ci.degenerate);
  EXPECT_LE(ci.lo, 0.5);
  EXPECT_GE(ci.hi, 0.5);
}

TEST(BootstrapCi, DeterministicForSeed) {
  const auto x = random_vector(20, 9);
  const auto a = bootstrap_ci(x, 0.9, 2000, 5);
  const auto b = bootstrap_ci(x, 0.9, 2000, 5);
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);
}

TEST(BootstrapCi, BoundsWithinSampleRange) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto x = random_vector(1 + seed % 7, seed, seed % 3 == 0);
    const auto ci = bootstrap_ci(x, 0.95, 200, seed);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    EXPECT_GE(ci.lo, *lo);
    EXPECT_LE(ci.hi, *hi);
    EXPECT_LE(ci.lo, ci.hi);
  }
}

TEST(BootstrapCi, NarrowsAroundTheMean) {
  const auto x = random_vector(400, 77);
  const auto ci = bootstrap_ci(x, 0.95, 5000, 1);
  const double se = 1.0 / std::sqrt(400.0);
  EXPECT_NEAR(ci.hi - ci.lo, 2 * 1.96 * se, 0.25 * se * 4);
  EXPECT_LT(ci.lo, ci.mean);
  EXPECT_GT(ci.hi, ci.mean);
}

TEST(BootstrapCi, Errors) {
  try {
    bootstrap_ci(std::vector<double>{}, 0.95, 10, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  EXPECT_THROW(bootstrap_ci(std::vector<double>{1, 2}, 1.0, 10, 0), Error);
  EXPECT_THROW(bootstrap_ci(std::vector<double>{1, 2}, 0.95, 0, 0), Error);
}

TEST(SortedQuantile, LinearInterpolation) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  EXPECT_EQ(sorted_quantile(v, 0.0), 1);
  EXPECT_EQ(sorted_quantile(v, 1.0), 5);
  EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.1), 1.4);
}

}  // namespace
}  // namespace srmkit::stats

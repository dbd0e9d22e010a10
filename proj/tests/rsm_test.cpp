#include "srmkit/rsm.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "srmkit/errors.hpp"
#include "srmkit/stats.hpp"
#include "srmkit/tolerances.hpp"
#include "test_util.hpp"

namespace srmkit {
namespace {

using testing::activity;
using testing::gaussian;

constexpr auto kPearsonNorm = ColumnNormalization::kPearson;
constexpr auto kUnitNorm = ColumnNormalization::kUnitNorm;

std::vector<double> column(const Matrix& a, Index j) {
  return std::vector<double>(a.col(j).data(), a.col(j).data() + a.rows());
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(WithinRsm, IdentityUnderPearson) {
  const Rsm r = within_rsm(Matrix::Identity(2, 2), kPearsonNorm);
  EXPECT_EQ(r.kind, RsmKind::kWithin);
  Matrix expected(2, 2);
  expected << 1, -1,
              -1, 1;
  EXPECT_LT(max_abs(r.values - expected), 1e-12);
}

TEST(WithinRsm, IdenticalAndOpposedColumns) {
  Matrix a = gaussian(6, 4, 1);
  a.col(2) = a.col(0);
  a.col(3) = -a.col(0);  // also anti-correlated after centering
  for (auto policy : {kPearsonNorm, kUnitNorm}) {
    const Rsm r = within_rsm(a, policy);
    EXPECT_NEAR(r.values(0, 2), 1.0, 1e-12);
    EXPECT_NEAR(r.values(0, 3), -1.0, 1e-12);
  }
}

TEST(WithinRsm, MatchesScalarPearsonPerEntry) {
  const Matrix a = gaussian(7, 5, 2);
  const Rsm r = within_rsm(a, kPearsonNorm);
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      EXPECT_NEAR(r.values(i, j), stats::pearson(column(a, i), column(a, j)), 1e-12);
    }
  }
}

TEST(WithinRsm, UnitNormIsCosineSimilarity) {
  const Matrix a = gaussian(7, 4, 3);
  const Rsm r = within_rsm(a, kUnitNorm);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) {
      const double cosine = a.col(i).dot(a.col(j)) / (a.col(i).norm() * a.col(j).norm());
      EXPECT_NEAR(r.values(i, j), cosine, 1e-12);
    }
  }
}

TEST(WithinRsm, SatisfiesInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto policy : {kPearsonNorm, kUnitNorm}) {
      const Rsm r = within_rsm(gaussian(5 + static_cast<Index>(seed), 12, seed), policy);
      EXPECT_NO_THROW(check_rsm(r, tol::kRsm));
    }
  }
}

TEST(WithinRsm, ConstantColumnNamesNetworkAndLayer) {
  Matrix a = gaussian(4, 5, 6);
  a.col(3).setConstant(2.5);
  try {
    within_rsm(activity("netA", a, "conv2"), kPearsonNorm);
    FAIL();
  } catch (const DegenerateColumnError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateColumn);
    EXPECT_EQ(e.column(), 3);
    const std::string what = e.what();
    EXPECT_NE(what.find("netA"), std::string::npos) << what;
    EXPECT_NE(what.find("conv2"), std::string::npos) << what;
  }
  a.col(3).setZero();
  EXPECT_THROW(within_rsm(a, kUnitNorm), DegenerateColumnError);
}

TEST(WithinRsm, OrthogonalInvariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 3 + static_cast<Index>(seed) * 6;
    const Matrix a = gaussian(n, 15, seed);
    const Matrix qa = random_orthogonal(n, 1000 + seed) * a;
    EXPECT_LT(max_abs(within_rsm(qa).values - within_rsm(a).values), tol::kRsm);
    const Matrix pa = random_permutation(n, seed) * a;
    EXPECT_LT(max_abs(within_rsm(pa, kPearsonNorm).values - within_rsm(a, kPearsonNorm).values),
              tol::kRsm);
  }
}

TEST(InterRsm, SelfEqualsWithinExactly) {
  for (auto policy : {kPearsonNorm, kUnitNorm}) {
    const Matrix a = gaussian(8, 10, 4);
    const Rsm inter = inter_rsm(a, a, policy);
    EXPECT_EQ(inter.kind, RsmKind::kInter);
    EXPECT_TRUE(inter.values == within_rsm(a, policy).values);
  }
}

TEST(InterRsm, DiffersFromWithinAfterRotation) {
  const Matrix a = gaussian(8, 10, 5);
  const Matrix b = random_orthogonal(8, 9) * a;
  EXPECT_GT(max_abs(inter_rsm(a, b).values - within_rsm(a).values), 0.1);
}

TEST(InterRsm, TwoExampleScalarOracle) {
  Matrix a(3, 2), b(3, 2);
  a << 1, 2,
       4, 0,
       2, 5;
  b << 0, 3,
       1, 1,
       7, 2;
  const Rsm r = inter_rsm(a, b, kPearsonNorm);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      EXPECT_NEAR(r.values(i, j), stats::pearson(column(a, i), column(b, j)), 1e-12);
    }
  }
  EXPECT_NO_THROW(check_rsm(r, tol::kRsm));
}

TEST(InterRsm, Errors) {
  EXPECT_EQ(code_of([] { inter_rsm(gaussian(4, 5, 1), gaussian(4, 6, 2)); }),
            ErrorCode::kExampleCountMismatch);
  EXPECT_EQ(code_of([] { inter_rsm(gaussian(4, 5, 1), gaussian(3, 5, 2)); }),
            ErrorCode::kDimensionMismatch);
  Matrix bad = gaussian(4, 5, 3);
  bad.col(0).setConstant(1.0);
  EXPECT_EQ(code_of([&] { inter_rsm(gaussian(4, 5, 1), bad, kPearsonNorm); }),
            ErrorCode::kDegenerateColumn);
}

TEST(AverageRsm, SingleAndRepeated) {
  const Rsm r = within_rsm(gaussian(5, 6, 7));
  const std::vector<Rsm> one{r};
  EXPECT_TRUE(average_rsm(one).values.isApprox(r.values, 1e-15));
  const std::vector<Rsm> ten(10, r);
  EXPECT_LT(max_abs(average_rsm(ten).values - r.values), 1e-15);
}

TEST(AverageRsm, OppositesCancel) {
  const Rsm r = inter_rsm(gaussian(5, 6, 7), gaussian(5, 6, 8));
  const Rsm neg{-r.values, RsmKind::kInter};
  const std::vector<Rsm> pair{r, neg};
  EXPECT_LT(max_abs(average_rsm(pair).values), 1e-15);
}

TEST(AverageRsm, KeepsUnitDiagonal) {
  std::vector<Rsm> rsms;
  for (std::uint64_t s = 0; s < 10; ++s) rsms.push_back(within_rsm(gaussian(6, 9, s)));
  const Rsm avg = average_rsm(rsms);
  EXPECT_LT((avg.values.diagonal().array() - 1.0).abs().maxCoeff(), tol::kRsm);
  EXPECT_NO_THROW(check_rsm(avg, tol::kRsm));
}

TEST(AverageRsm, Errors) {
  EXPECT_EQ(code_of([] { average_rsm(std::vector<Rsm>{}); }), ErrorCode::kEmptyList);
  const std::vector<Rsm> sizes{within_rsm(gaussian(3, 4, 1)), within_rsm(gaussian(3, 5, 2))};
  EXPECT_EQ(code_of([&] { average_rsm(sizes); }), ErrorCode::kSizeMismatch);
  const Matrix a = gaussian(3, 4, 1);
  const std::vector<Rsm> kinds{within_rsm(a), inter_rsm(a, gaussian(3, 4, 2))};
  EXPECT_EQ(code_of([&] { average_rsm(kinds); }), ErrorCode::kSizeMismatch);
}

TEST(AveragedRsms, MatchPairwiseDefinitions) {
  std::vector<Matrix> mats;
  for (std::uint64_t s = 0; s < 4; ++s) mats.push_back(gaussian(5, 7, 20 + s));
  std::vector<Rsm> within, inter;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    within.push_back(within_rsm(mats[i]));
    for (std::size_t j = 0; j < mats.size(); ++j) {
      if (i != j) inter.push_back(inter_rsm(mats[i], mats[j]));
    }
  }
  EXPECT_LT(max_abs(averaged_within_rsm(mats).values - average_rsm(within).values), 1e-12);
  const Rsm avg_inter = averaged_inter_rsm(mats);
  EXPECT_EQ(avg_inter.kind, RsmKind::kInter);
  EXPECT_LT(max_abs(avg_inter.values - average_rsm(inter).values), 1e-12);
  EXPECT_LT(max_abs(avg_inter.values - avg_inter.values.transpose()), 1e-12);
}

TEST(Vectorize, StrictUpperTriangleOfSymmetrizedMatrix) {
  Matrix m(3, 3);
  m << 1, 2, 3,
       4, 1, 6,
       7, 8, 1;
  const std::vector<double> v = vectorize(Rsm{m, RsmKind::kInter});
  EXPECT_EQ(v, (std::vector<double>{3, 5, 7}));
}

TEST(RsmCorrelation, SelfAndNegation) {
  const Rsm r = within_rsm(gaussian(6, 8, 9));
  EXPECT_NEAR(rsm_correlation(r, r), 1.0, 1e-12);
  EXPECT_NEAR(rsm_correlation(r, r, CorrelationMethod::kSpearman), 1.0, 1e-12);
  const Rsm neg{-r.values, RsmKind::kInter};
  EXPECT_NEAR(rsm_correlation(r, neg), -1.0, 1e-12);
}

TEST(RsmCorrelation, HandRankedSpearman) {
  // upper triangles (0.9, 0.1, 0.5) and (0.2, -0.3, 0.8): ranks (3,1,2) and
  // (2,1,3), sum d^2 = 2, rho = 1 - 6*2/(3*8) = 0.5
  Matrix x(3, 3), y(3, 3);
  x << 1, 0.9, 0.1,
       0.9, 1, 0.5,
       0.1, 0.5, 1;
  y << 1, 0.2, -0.3,
       0.2, 1, 0.8,
       -0.3, 0.8, 1;
  EXPECT_NEAR(rsm_correlation(Rsm{x}, Rsm{y}, CorrelationMethod::kSpearman), 0.5, 1e-12);
}

TEST(RsmCorrelation, SymmetricAndRescalingInvariant) {
  const Rsm a = within_rsm(gaussian(5, 9, 10));
  const Rsm b = inter_rsm(gaussian(5, 9, 11), gaussian(5, 9, 12));
  for (auto method : {CorrelationMethod::kPearson, CorrelationMethod::kSpearman}) {
    EXPECT_NEAR(rsm_correlation(a, b, method), rsm_correlation(b, a, method), 1e-14);
  }
  const Rsm affine{(3.0 * b.values).array() + 0.25, RsmKind::kInter};
  EXPECT_NEAR(rsm_correlation(a, affine), rsm_correlation(a, b), 1e-12);
  // monotone maps commute with symmetrizing only for symmetric input
  const Rsm c = within_rsm(gaussian(5, 9, 13));
  const Rsm cubed{c.values.array().cube(), RsmKind::kWithin};
  EXPECT_NEAR(rsm_correlation(a, cubed, CorrelationMethod::kSpearman),
              rsm_correlation(a, c, CorrelationMethod::kSpearman), 1e-12);
}

TEST(RsmCorrelation, Errors) {
  EXPECT_EQ(code_of([] {
              rsm_correlation(within_rsm(gaussian(3, 4, 1)), within_rsm(gaussian(3, 5, 1)));
            }),
            ErrorCode::kSizeMismatch);
  // m = 2 leaves a single comparison entry, which has no variance
  EXPECT_EQ(code_of([] {
              rsm_correlation(within_rsm(gaussian(3, 2, 1)), within_rsm(gaussian(3, 2, 2)));
            }),
            ErrorCode::kZeroVariance);
  const Rsm flat{Matrix::Constant(4, 4, 0.5), RsmKind::kInter};
  EXPECT_EQ(code_of([&] { rsm_correlation(flat, within_rsm(gaussian(3, 4, 1))); }),
            ErrorCode::kZeroVariance);
}

TEST(Consistency, IdenticalMatrices) {
  const Matrix a = gaussian(6, 10, 13);
  const std::vector<Matrix> mats(4, a);
  const ConsistencyResult c = pairwise_wrsm_consistency(mats);
  ASSERT_EQ(c.pairs.size(), 6u);
  EXPECT_NEAR(c.mean, 1.0, 1e-12);
  EXPECT_EQ(c.pairs.front().first, 0u);
  EXPECT_EQ(c.pairs.front().second, 1u);
  EXPECT_EQ(c.pairs.back().first, 2u);
  EXPECT_EQ(c.pairs.back().second, 3u);
}

TEST(Consistency, OrthogonallyRelatedMatrices) {
  const Matrix h = gaussian(16, 30, 14);
  std::vector<Matrix> mats;
  for (std::uint64_t s = 0; s < 5; ++s) mats.push_back(random_orthogonal(16, s) * h);
  const ConsistencyResult c = pairwise_wrsm_consistency(mats);
  for (const auto& p : c.pairs) EXPECT_NEAR(p.value, 1.0, 1e-10);
}

TEST(Consistency, IndependentMatricesNearZero) {
  std::vector<Matrix> mats;
  for (std::uint64_t s = 0; s < 10; ++s) mats.push_back(gaussian(20, 60, 300 + s));
  const ConsistencyResult c = pairwise_wrsm_consistency(mats, kPearsonNorm);
  EXPECT_LT(std::abs(c.mean), 0.05);
}

TEST(CheckRsm, RejectsBrokenInvariants) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 0.5;
  EXPECT_THROW(check_rsm(Rsm{m, RsmKind::kWithin}, tol::kRsm), Error);
  EXPECT_NO_THROW(check_rsm(Rsm{m, RsmKind::kInter}, tol::kRsm));
  m(0, 1) = 1.5;
  EXPECT_THROW(check_rsm(Rsm{m, RsmKind::kInter}, tol::kRsm), Error);
  m = Matrix::Identity(3, 3);
  m(2, 2) = 0.9;
  EXPECT_THROW(check_rsm(Rsm{m, RsmKind::kWithin}, tol::kRsm), Error);
}

}  // namespace
}  // namespace srmkit

#pragma once

// Representational similarity matrices (RSMs) and the alignment metrics built
// on them.
//
// An RSM is the m x m matrix of similarities between the activity patterns a
// layer produces for m examples. After column normalization A -> Â, the
// within-network RSM is Â^T Â and the inter-network RSM of two networks with
// the same number of units is Â^T B̂.

#include <span>
#include <string_view>
#include <vector>

#include "srmkit/activity.hpp"
#include "srmkit/matcore.hpp"

namespace srmkit {

enum class RsmKind { kWithin, kInter };

std::string_view to_string(RsmKind kind);

struct Rsm {
  Matrix values;
  RsmKind kind = RsmKind::kWithin;

  Index size() const { return values.rows(); }
};

enum class CorrelationMethod { kPearson, kSpearman };

std::string_view to_string(CorrelationMethod method);

// Human-readable statement of which entries rsm_correlation compares; reports
// carry it next to every correlation they print.
inline constexpr std::string_view kVectorizationRule =
    "strict upper triangle of (M + M^T)/2; inter-network RSMs averaged over "
    "ordered pairs i != j before symmetrizing; diagonal excluded";

Rsm within_rsm(const Matrix& a,
               ColumnNormalization normalization = kDefaultNormalization);
Rsm within_rsm(const ActivityMatrix& a,
               ColumnNormalization normalization = kDefaultNormalization);

/// Entry (i, j) is the similarity of column i of `a` and column j of `b`.
/// Requires equal example counts and equal unit counts.
Rsm inter_rsm(const Matrix& a, const Matrix& b,
              ColumnNormalization normalization = kDefaultNormalization);
Rsm inter_rsm(const ActivityMatrix& a, const ActivityMatrix& b,
              ColumnNormalization normalization = kDefaultNormalization);

/// Entrywise mean of equally sized RSMs of one kind.
Rsm average_rsm(std::span<const Rsm> rsms);

/// Mean of within_rsm over all matrices.
Rsm averaged_within_rsm(std::span<const Matrix> mats,
                        ColumnNormalization normalization = kDefaultNormalization);

/// Mean of inter_rsm(X_i, X_j) over all ordered pairs i != j. The result is
/// symmetric because inter_rsm(X_j, X_i) = inter_rsm(X_i, X_j)^T.
Rsm averaged_inter_rsm(std::span<const Matrix> mats,
                       ColumnNormalization normalization = kDefaultNormalization);

/// Comparison vector of an RSM: the strict upper triangle of (M + M^T)/2,
/// row by row.
std::vector<double> vectorize(const Rsm& rsm);

double rsm_correlation(const Rsm& x, const Rsm& y,
                       CorrelationMethod method = CorrelationMethod::kPearson);

struct PairCorrelation {
  std::size_t first = 0;
  std::size_t second = 0;
  double value = 0.0;
};

struct ConsistencyResult {
  double mean = 0.0;
  std::vector<PairCorrelation> pairs;  // (0,1), (0,2), ..., (N-2,N-1)
};

/// Pearson correlation of vectorized within-RSMs for every unordered pair.
ConsistencyResult pairwise_wrsm_consistency(
    std::span<const Matrix> mats,
    ColumnNormalization normalization = kDefaultNormalization);

/// Throws InvalidMatrix if `rsm` violates its kind's invariants (range,
/// and for within RSMs symmetry and unit diagonal) at tolerance `tol`.
void check_rsm(const Rsm& rsm, double tol);

}  // namespace srmkit

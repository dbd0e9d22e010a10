#pragma once

// Dense real-matrix primitives shared by the rest of the toolkit.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace srmkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Compact singular value decomposition a ~= u * diag(sigma) * vt.
///
/// u is rows x r with orthonormal columns, vt is r x cols with orthonormal
/// rows and sigma is non-increasing. Each left singular vector is signed so
/// that its largest-magnitude entry is positive (first such entry on ties),
/// which makes the factors reproducible across runs and backends.
struct ThinSvd {
  Matrix u;
  Vector sigma;
  Matrix vt;

  Index rank() const { return sigma.size(); }
  Matrix reconstruct() const { return u * sigma.asDiagonal() * vt; }
};

/// How example columns are normalized before computing similarities.
///
/// kUnitNorm scales each column to unit Euclidean norm, so A^T A is the
/// cosine-similarity matrix. It commutes with any orthogonal transform of the
/// units (standardize(QA) == Q standardize(A)), which is what makes RSMs and
/// SRM fits invariant to rigid-body transforms of a network's native space.
///
/// kPearson additionally centers each column across units, so A^T A is the
/// column-wise Pearson correlation matrix. Centering uses the all-ones
/// direction, which a general orthogonal transform does not preserve
/// (permutations do).
enum class ColumnNormalization { kUnitNorm, kPearson };

inline constexpr ColumnNormalization kDefaultNormalization =
    ColumnNormalization::kUnitNorm;

std::string_view to_string(ColumnNormalization normalization);
ColumnNormalization parse_normalization(std::string_view text);

/// Throws InvalidMatrix if `a` is empty or holds NaN/Inf.
void require_finite(const Matrix& a, std::string_view what = "matrix");

/// Thin SVD, optionally truncated to the leading `rank` triplets.
ThinSvd thin_svd(const Matrix& a, std::optional<Index> rank = std::nullopt);

/// Haar-distributed n x n orthogonal matrix: QR of a standard Gaussian matrix
/// with the signs of R's diagonal folded into Q.
Matrix random_orthogonal(Index n, std::uint64_t seed);

/// Uniformly random n x n permutation matrix (Fisher-Yates).
Matrix random_permutation(Index n, std::uint64_t seed);

/// Normalizes each column according to `normalization`. A column with nothing
/// to normalize (zero norm, or constant under kPearson) is a
/// DegenerateColumnError; such columns are never dropped or patched.
Matrix standardize_columns(
    const Matrix& a, ColumnNormalization normalization = kDefaultNormalization);

double frobenius_norm(const Matrix& a);

/// max |a_ij|
double max_abs(const Matrix& a);

/// ||W^T W - I||_max
double orthonormality_error(const Matrix& w);

}  // namespace srmkit

#include "srmkit/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "srmkit/errors.hpp"
#include "srmkit/tolerances.hpp"

namespace srmkit {

std::string_view to_string(ColumnNormalization normalization) {
  switch (normalization) {
    case ColumnNormalization::kUnitNorm: return "unit-norm";
    case ColumnNormalization::kPearson: return "pearson";
  }
  return "unknown";
}

ColumnNormalization parse_normalization(std::string_view text) {
  if (text == "unit-norm") return ColumnNormalization::kUnitNorm;
  if (text == "pearson") return ColumnNormalization::kPearson;
  throw Error(ErrorCode::kInvalidSpec,
              "unknown normalization '" + std::string(text) +
                  "' (expected unit-norm or pearson)");
}

void require_finite(const Matrix& a, std::string_view what) {
  if (a.size() == 0) {
    throw Error(ErrorCode::kInvalidMatrix, std::string(what) + " is empty");
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::kInvalidMatrix,
                std::string(what) + " contains non-finite entries");
  }
}

ThinSvd thin_svd(const Matrix& a, std::optional<Index> rank) {
  require_finite(a, "thin_svd input");
  const Index full = std::min(a.rows(), a.cols());
  const Index r = rank.value_or(full);
  if (r < 1 || r > full) {
    throw Error(ErrorCode::kDimensionMismatch,
                "requested rank " + std::to_string(r) + " outside [1, " +
                    std::to_string(full) + "]");
  }

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);

  ThinSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.sigma = svd.singularValues().head(r);
  out.vt = svd.matrixV().leftCols(r).transpose();

  for (Index j = 0; j < r; ++j) {
    Index pivot = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&pivot);
    if (out.u(pivot, j) < 0.0) {
      out.u.col(j) *= -1.0;
      out.vt.row(j) *= -1.0;
    }
  }
  return out;
}

Matrix random_orthogonal(Index n, std::uint64_t seed) {
  if (n < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "random_orthogonal needs n >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) z(i, j) = normal(rng);
  }

  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Vector diag = qr.matrixQR().diagonal();
  for (Index j = 0; j < n; ++j) {
    if (diag(j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix random_permutation(Index n, std::uint64_t seed) {
  if (n < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "random_permutation needs n >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Index> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(pick(rng))]);
  }
  Matrix p = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

Matrix standardize_columns(const Matrix& a, ColumnNormalization normalization) {
  require_finite(a, "standardize_columns input");
  Matrix out = a;
  for (Index j = 0; j < out.cols(); ++j) {
    auto col = out.col(j);
    const double raw_norm = col.norm();
    if (normalization == ColumnNormalization::kPearson) {
      col.array() -= col.mean();
    }
    const double norm = col.norm();
    // Centering a constant column leaves only rounding residue.
    if (norm == 0.0 || norm <= 1e-12 * raw_norm) {
      throw DegenerateColumnError(static_cast<std::size_t>(j), "");
    }
    col /= norm;
  }
  return out;
}

double frobenius_norm(const Matrix& a) {
  if (a.size() > 0 && !a.allFinite()) {
    throw Error(ErrorCode::kInvalidMatrix, "frobenius_norm of non-finite matrix");
  }
  return a.norm();
}

double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double orthonormality_error(const Matrix& w) {
  return max_abs(w.transpose() * w - Matrix::Identity(w.cols(), w.cols()));
}

}  // namespace srmkit

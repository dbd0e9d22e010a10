#include "srmkit/rsm.hpp"

#include <string>

#include "srmkit/errors.hpp"
#include "srmkit/stats.hpp"

namespace srmkit {

std::string_view to_string(RsmKind kind) {
  return kind == RsmKind::kWithin ? "within" : "inter";
}

std::string_view to_string(CorrelationMethod method) {
  return method == CorrelationMethod::kPearson ? "pearson" : "spearman";
}

namespace {

Matrix similarity(const Matrix& na, const Matrix& nb) { return na.transpose() * nb; }

Matrix normalized(const ActivityMatrix& a, ColumnNormalization normalization) {
  try {
    return standardize_columns(a.data, normalization);
  } catch (const DegenerateColumnError& e) {
    throw DegenerateColumnError(e.column(), "network " + a.network_id +
                                                " layer " + a.layer_id);
  }
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kExampleCountMismatch,
                "example counts differ: " + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.cols()));
  }
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "inter-network RSM needs equal unit counts: " +
                    std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
  }
}

}  // namespace

Rsm within_rsm(const Matrix& a, ColumnNormalization normalization) {
  const Matrix na = standardize_columns(a, normalization);
  return Rsm{similarity(na, na), RsmKind::kWithin};
}

Rsm within_rsm(const ActivityMatrix& a, ColumnNormalization normalization) {
  const Matrix na = normalized(a, normalization);
  return Rsm{similarity(na, na), RsmKind::kWithin};
}

Rsm inter_rsm(const Matrix& a, const Matrix& b, ColumnNormalization normalization) {
  require_same_shape(a, b);
  return Rsm{similarity(standardize_columns(a, normalization),
                        standardize_columns(b, normalization)),
             RsmKind::kInter};
}

Rsm inter_rsm(const ActivityMatrix& a, const ActivityMatrix& b,
              ColumnNormalization normalization) {
  require_same_shape(a.data, b.data);
  return Rsm{similarity(normalized(a, normalization), normalized(b, normalization)),
             RsmKind::kInter};
}

Rsm average_rsm(std::span<const Rsm> rsms) {
  if (rsms.empty()) throw Error(ErrorCode::kEmptyList, "average_rsm of no RSMs");
  const auto& first = rsms.front();
  Matrix sum = Matrix::Zero(first.size(), first.size());
  for (const auto& r : rsms) {
    if (r.size() != first.size() || r.values.cols() != first.values.cols()) {
      throw Error(ErrorCode::kSizeMismatch,
                  "RSM sizes differ: " + std::to_string(first.size()) + " vs " +
                      std::to_string(r.size()));
    }
    if (r.kind != first.kind) {
      throw Error(ErrorCode::kSizeMismatch, "cannot average within and inter RSMs");
    }
    sum += r.values;
  }
  return Rsm{sum / static_cast<double>(rsms.size()), first.kind};
}

Rsm averaged_within_rsm(std::span<const Matrix> mats,
                        ColumnNormalization normalization) {
  std::vector<Rsm> rsms;
  rsms.reserve(mats.size());
  for (const auto& x : mats) rsms.push_back(within_rsm(x, normalization));
  return average_rsm(rsms);
}

Rsm averaged_inter_rsm(std::span<const Matrix> mats,
                       ColumnNormalization normalization) {
  if (mats.size() < 2) {
    throw Error(ErrorCode::kEmptyList, "inter-network RSM needs at least 2 networks");
  }
  for (const auto& x : mats) require_same_shape(mats.front(), x);

  // sum_{i != j} Â_i^T Â_j = (sum_i Â_i)^T (sum_j Â_j) - sum_i Â_i^T Â_i
  const Index n = mats.front().rows();
  const Index m = mats.front().cols();
  Matrix total = Matrix::Zero(n, m);
  Matrix diagonal_terms = Matrix::Zero(m, m);
  for (const auto& x : mats) {
    const Matrix nx = standardize_columns(x, normalization);
    total += nx;
    diagonal_terms.noalias() += nx.transpose() * nx;
  }
  Matrix cross = total.transpose() * total - diagonal_terms;
  const double pairs = static_cast<double>(mats.size() * (mats.size() - 1));
  return Rsm{cross / pairs, RsmKind::kInter};
}

std::vector<double> vectorize(const Rsm& rsm) {
  const Index m = rsm.size();
  if (rsm.values.cols() != m) {
    throw Error(ErrorCode::kSizeMismatch, "RSM is not square");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      out.push_back(0.5 * (rsm.values(i, j) + rsm.values(j, i)));
    }
  }
  return out;
}

double rsm_correlation(const Rsm& x, const Rsm& y, CorrelationMethod method) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "RSM sizes differ: " + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kSizeMismatch, "RSM correlation needs m >= 2");
  }
  const auto vx = vectorize(x);
  const auto vy = vectorize(y);
  if (vx.size() < 2) {
    // m = 2 leaves one comparison entry; correlation of a single point is
    // undefined.
    throw Error(ErrorCode::kZeroVariance,
                "RSM correlation needs at least 2 off-diagonal entries (m >= 3)");
  }
  return method == CorrelationMethod::kPearson ? stats::pearson(vx, vy)
                                               : stats::spearman(vx, vy);
}

ConsistencyResult pairwise_wrsm_consistency(std::span<const Matrix> mats,
                                            ColumnNormalization normalization) {
  if (mats.size() < 2) {
    throw Error(ErrorCode::kEmptyList, "consistency needs at least 2 networks");
  }
  std::vector<std::vector<double>> vectors;
  vectors.reserve(mats.size());
  for (const auto& x : mats) {
    if (x.cols() != mats.front().cols()) {
      throw Error(ErrorCode::kExampleCountMismatch,
                  "example counts differ: " + std::to_string(mats.front().cols()) +
                      " vs " + std::to_string(x.cols()));
    }
    vectors.push_back(vectorize(within_rsm(x, normalization)));
  }

  ConsistencyResult result;
  double sum = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      const double r = stats::pearson(vectors[i], vectors[j]);
      result.pairs.push_back({i, j, r});
      sum += r;
    }
  }
  result.mean = sum / static_cast<double>(result.pairs.size());
  return result;
}

void check_rsm(const Rsm& rsm, double tol) {
  const Matrix& v = rsm.values;
  if (v.rows() != v.cols()) throw Error(ErrorCode::kInvalidMatrix, "RSM is not square");
  require_finite(v, "RSM");
  if (v.maxCoeff() > 1.0 + tol || v.minCoeff() < -1.0 - tol) {
    throw Error(ErrorCode::kInvalidMatrix, "RSM entries outside [-1, 1]");
  }
  if (rsm.kind == RsmKind::kWithin) {
    if (max_abs(v - v.transpose()) > tol) {
      throw Error(ErrorCode::kInvalidMatrix, "within RSM is not symmetric");
    }
    if ((v.diagonal().array() - 1.0).abs().maxCoeff() > tol) {
      throw Error(ErrorCode::kInvalidMatrix, "within RSM diagonal is not 1");
    }
  }
}

}  // namespace srmkit

#pragma once

// Shared Response Model: given activity matrices X_1..X_N (n_i x m) of N
// networks on the same m examples, find W_i (n_i x k, orthonormal columns) and
// a shared response S (k x m) minimizing
//
//     sum_i ||X_i - W_i S||_F^2    subject to  W_i^T W_i = I_k.
//
// The fit alternates two exact block updates. With S fixed, each W_i is the
// orthogonal Procrustes solution U V^T from the SVD of X_i S^T. With the W_i
// fixed, the optimal S is the mean of W_i^T X_i. Every step solves its
// subproblem exactly, so the objective never increases.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srmkit/activity.hpp"
#include "srmkit/matcore.hpp"

namespace srmkit {

enum class SrmInit {
  // S from the top-k singular triplets (Sigma V^T) of the first network.
  kFirstNetworkSvd,
  // S = W^T X_1 for the first k columns of a seeded random orthogonal matrix.
  kRandomOrthogonal,
};

inline constexpr int kDefaultMaxIters = 200;
inline constexpr double kDefaultTol = 1e-9;

/// State handed to SrmOptions::on_iteration after each full iteration.
struct SrmIteration {
  int iteration = 0;  // 1-based
  double objective = 0.0;
  std::span<const Matrix> transforms;
  const Matrix* shared = nullptr;
};

struct SrmOptions {
  Index k = 1;
  int max_iters = kDefaultMaxIters;
  // Stop once |obj_t - obj_{t-1}| <= tol * obj_1 (obj_1 floored at a tiny
  // fraction of the data energy so exact fits terminate).
  double tol = kDefaultTol;
  std::uint64_t seed = 0;  // only read by SrmInit::kRandomOrthogonal
  SrmInit init = SrmInit::kFirstNetworkSvd;
  ColumnNormalization normalization = kDefaultNormalization;
  // Procrustes updates of one iteration run on up to this many threads. The
  // result does not depend on the thread count.
  int threads = 1;
  std::function<void(const SrmIteration&)> on_iteration;
};

struct SrmModel {
  Index k = 0;
  std::string layer_id;
  std::vector<std::string> network_ids;
  std::vector<Matrix> transforms;  // W_i, n_i x k
  Matrix shared;                   // S, k x m_train
  std::vector<double> fit_trace;   // objective after each iteration
  bool converged = false;
  int iterations = 0;
  ColumnNormalization normalization = kDefaultNormalization;
  double tol = kDefaultTol;
  int max_iters = kDefaultMaxIters;
  std::vector<std::string> warnings;

  std::size_t networks() const { return transforms.size(); }
  double final_objective() const { return fit_trace.empty() ? 0.0 : fit_trace.back(); }
};

SrmModel fit_srm(std::span<const ActivityMatrix> mats, const SrmOptions& options);

SrmModel fit_srm(std::span<const ActivityMatrix> mats, Index k,
                 int max_iters = kDefaultMaxIters, double tol = kDefaultTol,
                 std::uint64_t seed = 0);

struct ProcrustesResult {
  Matrix w;        // n x k, orthonormal columns
  Index rank = 0;  // numerical rank of X S^T; < k means the basis was completed
};

/// argmin over orthonormal-column W of ||x - W shared||_F.
ProcrustesResult procrustes(const Matrix& x, const Matrix& shared);

/// sum_i ||x_i - w_i shared||_F^2 on already-normalized data.
double srm_objective(std::span<const Matrix> x, std::span<const Matrix> transforms,
                     const Matrix& shared);

/// Objective of the model's parameters on `mats` (normalized with the model's
/// policy). The example count must match the model's shared response.
double srm_objective(const SrmModel& model, std::span<const ActivityMatrix> mats);

/// Projects each network into the shared space: W_i^T X_i (k x m each).
std::vector<Matrix> transform(const SrmModel& model,
                              std::span<const ActivityMatrix> mats);

/// (1/N) sum_i W_i^T X_i for held-out matrices.
Matrix shared_response(const SrmModel& model, std::span<const ActivityMatrix> mats);

/// 1 - sum_i ||X_i - W_i S*||^2 / sum_i ||X_i||^2 with S* the shared response
/// of `mats` itself.
double variance_explained(const SrmModel& model, std::span<const ActivityMatrix> mats);

/// Exact two-network SRM solution for patterns with equal within-network RSMs,
/// built from compact SVDs of the normalized patterns: W_a = U_a, W_b = U_b,
/// S = Sigma V^T.
struct SharedConstruction {
  Matrix wa;
  Matrix wb;
  Matrix shared;
  Vector sigma;
};

SharedConstruction build_srm_from_rsm_equal(
    const ActivityMatrix& a, const ActivityMatrix& b,
    ColumnNormalization normalization = kDefaultNormalization);

}  // namespace srmkit

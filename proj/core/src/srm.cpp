#include "srmkit/srm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "srmkit/errors.hpp"
#include "srmkit/rsm.hpp"
#include "srmkit/tolerances.hpp"

namespace srmkit {
namespace {

std::vector<Matrix> normalize_all(std::span<const ActivityMatrix> mats,
                                  ColumnNormalization normalization) {
  std::vector<Matrix> out;
  out.reserve(mats.size());
  for (const auto& a : mats) {
    validate(a);
    try {
      out.push_back(standardize_columns(a.data, normalization));
    } catch (const DegenerateColumnError& e) {
      throw DegenerateColumnError(e.column(), "network " + a.network_id +
                                                  " layer " + a.layer_id);
    }
  }
  return out;
}

double energy(std::span<const Matrix> x) {
  double total = 0.0;
  for (const auto& xi : x) total += xi.squaredNorm();
  return total;
}

Matrix mean_projection(std::span<const Matrix> x, std::span<const Matrix> w) {
  Matrix s = Matrix::Zero(w.front().cols(), x.front().cols());
  // fixed summation order keeps results independent of threading
  for (std::size_t i = 0; i < x.size(); ++i) s.noalias() += w[i].transpose() * x[i];
  return s / static_cast<double>(x.size());
}

void check_against_model(const SrmModel& model, std::span<const ActivityMatrix> mats) {
  if (mats.size() != model.networks()) {
    throw Error(ErrorCode::kNetworkCountMismatch,
                "model has " + std::to_string(model.networks()) +
                    " networks but " + std::to_string(mats.size()) + " were given");
  }
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (i < model.network_ids.size() && !model.network_ids[i].empty() &&
        mats[i].network_id != model.network_ids[i]) {
      throw Error(ErrorCode::kNetworkCountMismatch,
                  "network " + std::to_string(i) + " is '" + mats[i].network_id +
                      "' but the model expects '" + model.network_ids[i] + "'");
    }
    if (mats[i].units() != model.transforms[i].rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  mats[i].label() + " has " + std::to_string(mats[i].units()) +
                      " units but its transform expects " +
                      std::to_string(model.transforms[i].rows()));
    }
  }
  common_example_count(mats);
}

}  // namespace

ProcrustesResult procrustes(const Matrix& x, const Matrix& shared) {
  if (x.cols() != shared.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "procrustes: example counts differ");
  }
  if (shared.rows() > x.rows()) {
    throw Error(ErrorCode::kKTooLarge, "procrustes: k exceeds unit count");
  }
  const Matrix cross = x * shared.transpose();  // n x k
  const ThinSvd svd = thin_svd(cross);
  ProcrustesResult out;
  out.w = svd.u * svd.vt;
  const double top = svd.sigma.size() > 0 ? svd.sigma(0) : 0.0;
  out.rank = (svd.sigma.array() > tol::kCompactRank * top).count();
  if (top == 0.0) out.rank = 0;
  return out;
}

double srm_objective(std::span<const Matrix> x, std::span<const Matrix> transforms,
                     const Matrix& shared) {
  if (x.size() != transforms.size()) {
    throw Error(ErrorCode::kNetworkCountMismatch,
                "objective: data and transform counts differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (transforms[i].rows() != x[i].rows() || transforms[i].cols() != shared.rows() ||
        x[i].cols() != shared.cols()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "objective: shapes of network " + std::to_string(i) +
                      " are inconsistent");
    }
    total += (x[i] - transforms[i] * shared).squaredNorm();
  }
  return total;
}

SrmModel fit_srm(std::span<const ActivityMatrix> mats, const SrmOptions& options) {
  if (mats.size() < 2) {
    throw Error(ErrorCode::kNetworkCountMismatch,
                "fit_srm needs at least 2 networks, got " + std::to_string(mats.size()));
  }
  const Index m = common_example_count(mats);
  Index min_units = mats.front().units();
  for (const auto& a : mats) min_units = std::min(min_units, a.units());
  const Index k = options.k;
  if (k < 1 || k > min_units || k > m) {
    throw Error(ErrorCode::kKTooLarge,
                "k = " + std::to_string(k) + " must satisfy 1 <= k <= min units (" +
                    std::to_string(min_units) + ") and k <= examples (" +
                    std::to_string(m) + ")");
  }
  if (options.max_iters < 1) {
    throw Error(ErrorCode::kInvalidSpec, "max_iters must be >= 1");
  }
  if (!(options.tol >= 0.0)) throw Error(ErrorCode::kInvalidSpec, "tol must be >= 0");

  const std::vector<Matrix> x = normalize_all(mats, options.normalization);
  const std::size_t networks = x.size();
  const double total_energy = energy(x);

  SrmModel model;
  model.k = k;
  model.layer_id = mats.front().layer_id;
  for (const auto& a : mats) model.network_ids.push_back(a.network_id);
  model.normalization = options.normalization;
  model.tol = options.tol;
  model.max_iters = options.max_iters;
  model.transforms.resize(networks);

  if (options.init == SrmInit::kFirstNetworkSvd) {
    const ThinSvd svd = thin_svd(x.front(), k);
    model.shared = svd.sigma.asDiagonal() * svd.vt;
  } else {
    const Matrix w0 = random_orthogonal(x.front().rows(), options.seed).leftCols(k);
    model.shared = w0.transpose() * x.front();
  }

  std::vector<Index> ranks(networks, k);
  std::vector<bool> warned(networks, false);
  const auto update_transform = [&](std::size_t i) {
    ProcrustesResult p = procrustes(x[i], model.shared);
    model.transforms[i] = std::move(p.w);
    ranks[i] = p.rank;
  };
  const auto threads =
      static_cast<std::size_t>(std::clamp<int>(options.threads, 1, static_cast<int>(networks)));

  for (int iter = 1; iter <= options.max_iters; ++iter) {
    if (threads == 1) {
      for (std::size_t i = 0; i < networks; ++i) update_transform(i);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          for (std::size_t i = t; i < networks; i += threads) update_transform(i);
        });
      }
    }
    for (std::size_t i = 0; i < networks; ++i) {
      if (ranks[i] < k && !warned[i]) {
        warned[i] = true;
        model.warnings.push_back("iteration " + std::to_string(iter) + ": network " +
                                 model.network_ids[i] + " cross-product rank " +
                                 std::to_string(ranks[i]) + " < k = " +
                                 std::to_string(k) + "; Procrustes basis completed");
      }
    }

    model.shared = mean_projection(x, model.transforms);
    const double obj = srm_objective(x, model.transforms, model.shared);
    model.fit_trace.push_back(obj);
    model.iterations = iter;
    if (options.on_iteration) {
      options.on_iteration(SrmIteration{iter, obj, model.transforms, &model.shared});
    }

    if (obj <= tol::kExactFit * total_energy) {
      model.converged = true;
      break;
    }
    if (iter >= 2) {
      const double reference =
          std::max(model.fit_trace.front(), tol::kObjectiveFloor * total_energy);
      const double change = std::abs(obj - model.fit_trace[model.fit_trace.size() - 2]);
      if (change <= options.tol * reference) {
        model.converged = true;
        break;
      }
    }
  }
  return model;
}

SrmModel fit_srm(std::span<const ActivityMatrix> mats, Index k, int max_iters,
                 double tol, std::uint64_t seed) {
  SrmOptions options;
  options.k = k;
  options.max_iters = max_iters;
  options.tol = tol;
  options.seed = seed;
  return fit_srm(mats, options);
}

double srm_objective(const SrmModel& model, std::span<const ActivityMatrix> mats) {
  check_against_model(model, mats);
  if (mats.front().examples() != model.shared.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "objective needs the model's training example count (" +
                    std::to_string(model.shared.cols()) + "), got " +
                    std::to_string(mats.front().examples()));
  }
  const auto x = normalize_all(mats, model.normalization);
  return srm_objective(x, model.transforms, model.shared);
}

std::vector<Matrix> transform(const SrmModel& model,
                              std::span<const ActivityMatrix> mats) {
  check_against_model(model, mats);
  const auto x = normalize_all(mats, model.normalization);
  std::vector<Matrix> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.push_back(model.transforms[i].transpose() * x[i]);
  }
  return out;
}

Matrix shared_response(const SrmModel& model, std::span<const ActivityMatrix> mats) {
  check_against_model(model, mats);
  const auto x = normalize_all(mats, model.normalization);
  return mean_projection(x, model.transforms);
}

double variance_explained(const SrmModel& model, std::span<const ActivityMatrix> mats) {
  check_against_model(model, mats);
  const auto x = normalize_all(mats, model.normalization);
  const Matrix s = mean_projection(x, model.transforms);
  return 1.0 - srm_objective(x, model.transforms, s) / energy(x);
}

SharedConstruction build_srm_from_rsm_equal(const ActivityMatrix& a,
                                            const ActivityMatrix& b,
                                            ColumnNormalization normalization) {
  validate(a);
  validate(b);
  if (a.examples() != b.examples()) {
    throw Error(ErrorCode::kExampleCountMismatch,
                a.label() + " and " + b.label() + " differ in example count");
  }

  const Rsm ra = within_rsm(a, normalization);
  const Rsm rb = within_rsm(b, normalization);
  const double rsm_gap = max_abs(ra.values - rb.values);
  if (rsm_gap > tol::kRsmEquality) {
    throw Error(ErrorCode::kRsmMismatch,
                "within-network RSMs differ by " + std::to_string(rsm_gap));
  }

  // Equal normalized RSMs mean equal Gram matrices of the normalized data, so
  // the construction runs on normalized patterns.
  const Matrix xa = standardize_columns(a.data, normalization);
  const Matrix xb = standardize_columns(b.data, normalization);
  const ThinSvd sa = thin_svd(xa);
  ThinSvd sb = thin_svd(xb);
  const double top = sa.sigma(0);
  const auto compact_rank = [&](const Vector& sigma) {
    return static_cast<Index>((sigma.array() > tol::kCompactRank * top).count());
  };
  const Index r = compact_rank(sa.sigma);
  if (r == 0) throw Error(ErrorCode::kDegenerateSpectrum, a.label() + " is zero");
  if (compact_rank(sb.sigma) != r) {
    throw Error(ErrorCode::kRsmMismatch, "patterns have different ranks");
  }
  for (Index j = 0; j + 1 < r; ++j) {
    if (sa.sigma(j) - sa.sigma(j + 1) < tol::kSpectrumGap * top) {
      throw Error(ErrorCode::kDegenerateSpectrum,
                  "singular values " + std::to_string(j) + " and " +
                      std::to_string(j + 1) + " of " + a.label() +
                      " coincide; the shared basis is not unique");
    }
  }
  if (max_abs(sa.sigma.head(r) - sb.sigma.head(r)) > tol::kConstructionResidual * top) {
    throw Error(ErrorCode::kRsmMismatch, "singular values of the patterns differ");
  }

  // Singular pairs are only defined up to a joint sign; match B's right
  // vectors to A's so both share one S.
  for (Index j = 0; j < r; ++j) {
    if (sa.vt.row(j).dot(sb.vt.row(j)) < 0.0) {
      sb.u.col(j) *= -1.0;
      sb.vt.row(j) *= -1.0;
    }
  }

  SharedConstruction out;
  out.sigma = sa.sigma.head(r);
  out.wa = sa.u.leftCols(r);
  out.wb = sb.u.leftCols(r);
  out.shared = out.sigma.asDiagonal() * sa.vt.topRows(r);

  const double residual_b = frobenius_norm(xb - out.wb * out.shared);
  if (residual_b > tol::kConstructionResidual * frobenius_norm(xb)) {
    throw Error(ErrorCode::kRsmMismatch,
                "no exact shared representation (residual " + std::to_string(residual_b) + ")");
  }
  return out;
}

}  // namespace srmkit

#include "srmkit/evaluate.hpp"

#include <algorithm>

#include "srmkit/errors.hpp"
#include "srmkit/simkit.hpp"

namespace srmkit {

namespace {

std::vector<double> values_of(const std::vector<PairCorrelation>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.value);
  return out;
}

}  // namespace

std::vector<ActivityMatrix> match_model_networks(const SrmModel& model,
                                                 std::span<const ActivityMatrix> mats) {
  std::vector<ActivityMatrix> out;
  out.reserve(model.network_ids.size());
  for (const auto& id : model.network_ids) {
    const auto it = std::find_if(mats.begin(), mats.end(),
                                 [&](const ActivityMatrix& a) { return a.network_id == id; });
    if (it == mats.end()) {
      throw Error(ErrorCode::kNetworkCountMismatch,
                  "model network '" + id + "' is missing from the evaluation data");
    }
    out.push_back(*it);
  }
  return out;
}

LayerEvaluation evaluate_layer(const SrmModel& model, std::span<const ActivityMatrix> test,
                               const EvaluationSettings& settings) {
  const std::vector<Matrix> shared = transform(model, test);
  const std::vector<Matrix> native = data_of(test);
  const auto norm = model.normalization;
  const std::size_t n_nets = test.size();

  LayerEvaluation ev;
  ev.layer_id = model.layer_id;
  ev.k = model.k;
  ev.normalization = norm;
  ev.network_ids = model.network_ids;
  ev.examples = common_example_count(test);
  for (const auto& a : test) ev.units.push_back(a.units());
  const bool equal_units =
      std::all_of(ev.units.begin(), ev.units.end(), [&](Index n) { return n == ev.units[0]; });

  ev.native_within = averaged_within_rsm(native, norm);
  ev.shared_inter = averaged_inter_rsm(shared, norm);
  ev.shared_pearson = rsm_correlation(ev.shared_inter, ev.native_within);
  ev.shared_spearman =
      rsm_correlation(ev.shared_inter, ev.native_within, CorrelationMethod::kSpearman);
  if (equal_units) {
    ev.native_inter = averaged_inter_rsm(native, norm);
    ev.native_pearson = rsm_correlation(*ev.native_inter, ev.native_within);
    ev.native_spearman =
        rsm_correlation(*ev.native_inter, ev.native_within, CorrelationMethod::kSpearman);
  }

  // Variance explained, overall and per network, against the shared response
  // of the evaluation data itself.
  Matrix s_star = Matrix::Zero(model.k, ev.examples);
  for (const auto& y : shared) s_star += y;
  s_star /= static_cast<double>(n_nets);
  double residual = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < n_nets; ++i) {
    const Matrix x = standardize_columns(native[i], norm);
    const double r = (x - model.transforms[i] * s_star).squaredNorm();
    const double e = x.squaredNorm();
    ev.network_variance_explained.push_back(1.0 - r / e);
    residual += r;
    energy += e;
  }
  ev.variance_explained = 1.0 - residual / energy;

  ev.consistency = pairwise_wrsm_consistency(native, norm);
  for (std::size_t i = 0; i < n_nets; ++i) {
    for (std::size_t j = i + 1; j < n_nets; ++j) {
      const Rsm pair_shared = inter_rsm(shared[i], shared[j], norm);
      ev.shared_pairs.push_back({i, j, rsm_correlation(pair_shared, ev.native_within)});
      if (equal_units) {
        const Rsm pair_native = inter_rsm(native[i], native[j], norm);
        ev.native_pairs.push_back({i, j, rsm_correlation(pair_native, ev.native_within)});
      }
    }
  }

  const auto ci = [&](const std::vector<double>& v, std::uint64_t stream) {
    return stats::bootstrap_ci(v, settings.level, settings.resamples,
                               sim::derive_seed(settings.seed, stream));
  };
  ev.shared_ci = ci(values_of(ev.shared_pairs), 0);
  if (equal_units) ev.native_ci = ci(values_of(ev.native_pairs), 1);
  ev.consistency_ci = ci(values_of(ev.consistency.pairs), 2);
  ev.variance_explained_ci = ci(ev.network_variance_explained, 3);
  return ev;
}

}  // namespace srmkit

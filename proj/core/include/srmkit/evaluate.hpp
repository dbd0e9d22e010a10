#pragma once

// Scores a fitted model on held-out activity of one layer.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srmkit/activity.hpp"
#include "srmkit/rsm.hpp"
#include "srmkit/srm.hpp"
#include "srmkit/stats.hpp"

namespace srmkit {

struct EvaluationSettings {
  int resamples = stats::kDefaultResamples;
  double level = stats::kDefaultLevel;
  std::uint64_t seed = 0;
};

struct LayerEvaluation {
  std::string layer_id;
  Index k = 0;
  ColumnNormalization normalization = kDefaultNormalization;
  std::vector<std::string> network_ids;
  std::vector<Index> units;
  Index examples = 0;

  // averaged iRSM (shared space) vs averaged native wRSM
  double shared_pearson = 0.0;
  double shared_spearman = 0.0;
  // same comparison with the native iRSM; empty when unit counts differ
  std::optional<double> native_pearson;
  std::optional<double> native_spearman;
  double variance_explained = 0.0;
  std::vector<double> network_variance_explained;
  ConsistencyResult consistency;

  // per unordered network pair: iRSM of the pair vs averaged wRSM
  std::vector<PairCorrelation> shared_pairs;
  std::vector<PairCorrelation> native_pairs;

  stats::BootstrapCi shared_ci;                 // over shared_pairs
  std::optional<stats::BootstrapCi> native_ci;  // over native_pairs
  stats::BootstrapCi consistency_ci;            // over consistency.pairs
  stats::BootstrapCi variance_explained_ci;     // over networks

  Rsm native_within;
  Rsm shared_inter;
  std::optional<Rsm> native_inter;
};

/// Picks the matrices of the model's networks, in model order. Throws
/// NetworkCountMismatch naming the first network the model expects but
/// `mats` lacks.
std::vector<ActivityMatrix> match_model_networks(const SrmModel& model,
                                                 std::span<const ActivityMatrix> mats);

LayerEvaluation evaluate_layer(const SrmModel& model, std::span<const ActivityMatrix> test,
                               const EvaluationSettings& settings = {});

}  // namespace srmkit

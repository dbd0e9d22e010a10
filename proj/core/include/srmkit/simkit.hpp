#pragma once

// Synthetic-recovery experiment: build N networks whose activity patterns are
// random orthogonal (or permutation) transforms of one source matrix H, fit an
// SRM on an alignment split of the examples, and check on the held-out test
// split whether the shared space realigns them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srmkit/activity.hpp"
#include "srmkit/matcore.hpp"
#include "srmkit/rsm.hpp"
#include "srmkit/srm.hpp"
#include "srmkit/stats.hpp"

namespace srmkit::sim {

enum class TransformFamily { kOrthogonal, kPermutation };
enum class SourceKind { kGaussian, kSupplied };

std::string_view to_string(TransformFamily family);
std::string_view to_string(SourceKind source);

// Defaults for the toy-task dimensions, which are not published.
inline constexpr Index kDefaultUnits = 64;
inline constexpr Index kDefaultExamples = 1024;
inline constexpr int kDefaultNetworks = 10;
inline constexpr int kDefaultRuns = 50;

struct SimulationSpec {
  Index units = kDefaultUnits;
  Index examples = kDefaultExamples;
  int networks = kDefaultNetworks;
  TransformFamily family = TransformFamily::kOrthogonal;
  SourceKind source = SourceKind::kGaussian;
  std::string source_path;      // recorded for reports when source is supplied
  Matrix supplied_source;       // used when source == kSupplied
  double noise_sigma = 0.0;
  double split_fraction = 0.5;  // fraction of examples in the alignment set
  int runs = kDefaultRuns;
  std::uint64_t seed = 0;
  std::optional<Index> k;       // shared dimension; defaults to units
  int max_iters = kDefaultMaxIters;
  double tol = kDefaultTol;
  int resamples = stats::kDefaultResamples;
  double level = stats::kDefaultLevel;
  ColumnNormalization normalization = kDefaultNormalization;

  Index shared_dim() const { return k.value_or(units); }
};

/// Throws InvalidSpec naming the offending field.
void validate(const SimulationSpec& spec);

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and bad
/// values are ConfigParse errors carrying the 1-based line number. Keys:
/// units, examples, networks, family, source, source_path, noise, split,
/// runs, seed, k, max_iters, tol, resamples, level, normalization.
/// A supplied source is only recorded here (source_path); the caller loads it.
SimulationSpec parse_simulation_config(std::string_view text,
                                       SimulationSpec base = {});

/// Stable seed of run `run_index`: splitmix64(seed ^ splitmix64(run_index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct SimulationRun {
  Matrix source;                          // H, units x examples
  std::vector<Matrix> mixing;             // ground-truth Q_i
  std::vector<ActivityMatrix> alignment;  // Q_i H (+ noise), alignment columns
  std::vector<ActivityMatrix> test;       // held-out columns
  std::vector<Index> alignment_columns;
  std::vector<Index> test_columns;
};

SimulationRun generate_run(const SimulationSpec& spec, int run_index);

struct RunMetrics {
  double shared_pearson = 0.0;    // averaged shared-space iRSM vs averaged wRSM
  double shared_spearman = 0.0;
  double native_pearson = 0.0;    // averaged native-space iRSM vs averaged wRSM
  double native_spearman = 0.0;
  double variance_explained = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
};

/// RSMs behind the metrics, for plotting.
struct RunRsms {
  Rsm native_within;  // averaged wRSM, native space
  Rsm shared_inter;   // averaged iRSM, shared space
  Rsm native_inter;   // averaged iRSM, native space
};

struct EvaluationOptions {
  int max_iters = kDefaultMaxIters;
  double tol = kDefaultTol;
  ColumnNormalization normalization = kDefaultNormalization;
  int threads = 1;
};

/// Fits SRM on `alignment`, transforms `test`, and scores the alignment on the
/// test split only. Networks must share a unit count for the native baseline.
RunMetrics evaluate_run(std::span<const ActivityMatrix> alignment,
                        std::span<const ActivityMatrix> test, Index k,
                        const EvaluationOptions& options = {},
                        RunRsms* rsms = nullptr);

struct MetricSummary {
  std::string name;
  stats::BootstrapCi ci;
};

struct SimulationResult {
  SimulationSpec spec;
  std::vector<RunMetrics> runs;  // ordered by run index
  std::vector<MetricSummary> aggregates;
  bool degenerate_ci = false;
  std::optional<RunRsms> first_run_rsms;

  const MetricSummary& aggregate(std::string_view name) const;
};

struct SimulationOptions {
  int threads = 1;
  bool keep_first_run_rsms = false;
};

/// Runs spec.runs independent runs and bootstraps each metric over runs. A
/// failing run aborts with its index in the message.
SimulationResult run_simulation(const SimulationSpec& spec,
                                const SimulationOptions& options = {});

}  // namespace srmkit::sim

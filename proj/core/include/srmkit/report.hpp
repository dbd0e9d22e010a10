#pragma once

// Structured reports and SRM model directories.
//
// Reports are JSON documents with a fixed key order:
//   schema_version, kind, spec, conventions, metrics, provenance
// Every numeric setting that produced a number is echoed under "spec"; every
// metric lists the convention entries it depends on. provenance.generated_at is
// the only field allowed to differ between two runs with identical inputs.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "srmkit/evaluate.hpp"
#include "srmkit/io.hpp"
#include "srmkit/simkit.hpp"
#include "srmkit/srm.hpp"
#include "srmkit/stats.hpp"

namespace srmkit::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

std::string_view toolkit_version();

/// UTC time formatted as ISO-8601, e.g. 2026-10-15T12:00:00Z.
std::string utc_timestamp();

struct Report {
  std::string kind;
  Json spec = Json::object();
  Json conventions = Json::object();
  Json metrics = Json::object();
  Json provenance = Json::object();
  std::optional<std::string> generated_at;

  Json to_json() const;
  std::string dump() const;
  std::string dump_without_timestamp() const;
};

Report parse_report(std::string_view text);
void write_report(const Report& report, const std::filesystem::path& path);

/// {mean, lo, hi, level, resamples, degenerate, resampling_axis}
Json ci_to_json(const stats::BootstrapCi& ci, std::string_view resampling_axis);

Json spec_to_json(const sim::SimulationSpec& spec);
Report simulation_report(const sim::SimulationResult& result);

/// Report of one or more evaluated layers. `spec` is echoed as given and
/// should hold every resolved setting of the invocation.
Report evaluation_report(std::span<const LayerEvaluation> layers, Json spec,
                         const EvaluationSettings& settings);

// Model directory layout:
//   model.json               metadata (see model_metadata)
//   shared.amat              S, k x m_train
//   transform_000.amat ...   W_i in network order
inline constexpr std::string_view kModelMetadataFile = "model.json";

Json model_metadata(const SrmModel& model);
void save_model(const SrmModel& model, const std::filesystem::path& dir);
SrmModel load_model(const std::filesystem::path& dir);

}  // namespace srmkit::io

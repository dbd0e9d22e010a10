#include "srmkit/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "srmkit/errors.hpp"
#include "srmkit/rsm.hpp"

#ifndef SRMKIT_VERSION
#define SRMKIT_VERSION "0.0.0"
#endif

namespace srmkit::io {
namespace fs = std::filesystem;

namespace {

std::string transform_file(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "transform_%03zu.amat", i);
  return buf;
}

}  // namespace

std::string_view toolkit_version() { return SRMKIT_VERSION; }

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json Report::to_json() const {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = kind;
  doc["spec"] = spec;
  doc["conventions"] = conventions;
  doc["metrics"] = metrics;
  Json prov = provenance;
  if (generated_at) prov["generated_at"] = *generated_at;
  doc["provenance"] = prov;
  return doc;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

std::string Report::dump_without_timestamp() const {
  Report copy = *this;
  copy.generated_at.reset();
  copy.provenance.erase("generated_at");
  return copy.dump();
}

Report parse_report(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfigParse, std::string("report is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("schema_version", 0) != kSchemaVersion) {
    throw Error(ErrorCode::kConfigParse, "unsupported report schema");
  }
  Report r;
  r.kind = doc.value("kind", "");
  r.spec = doc.value("spec", Json::object());
  r.conventions = doc.value("conventions", Json::object());
  r.metrics = doc.value("metrics", Json::object());
  r.provenance = doc.value("provenance", Json::object());
  if (r.provenance.contains("generated_at")) {
    r.generated_at = r.provenance["generated_at"].get<std::string>();
    r.provenance.erase("generated_at");
  }
  return r;
}

void write_report(const Report& report, const fs::path& path) {
  write_file_atomic(path, report.dump());
}

Json ci_to_json(const stats::BootstrapCi& ci, std::string_view resampling_axis) {
  Json j;
  j["mean"] = ci.mean;
  j["lo"] = ci.lo;
  j["hi"] = ci.hi;
  j["level"] = ci.level;
  j["resamples"] = ci.resamples;
  j["degenerate"] = ci.degenerate;
  j["method"] = "percentile";
  j["resampling_axis"] = resampling_axis;
  return j;
}

Json spec_to_json(const sim::SimulationSpec& spec) {
  Json j;
  j["units"] = spec.units;
  j["examples"] = spec.examples;
  j["networks"] = spec.networks;
  j["family"] = sim::to_string(spec.family);
  j["source"] = sim::to_string(spec.source);
  if (spec.source == sim::SourceKind::kSupplied) j["source_path"] = spec.source_path;
  j["noise"] = spec.noise_sigma;
  j["split"] = spec.split_fraction;
  j["runs"] = spec.runs;
  j["seed"] = spec.seed;
  j["k"] = spec.shared_dim();
  j["max_iters"] = spec.max_iters;
  j["tol"] = spec.tol;
  j["resamples"] = spec.resamples;
  j["level"] = spec.level;
  j["normalization"] = to_string(spec.normalization);
  return j;
}

Report simulation_report(const sim::SimulationResult& result) {
  const auto& spec = result.spec;
  Report r;
  r.kind = "simulation";
  r.spec = spec_to_json(spec);

  r.conventions["vectorization"] = kVectorizationRule;
  r.conventions["normalization"] = to_string(spec.normalization);
  r.conventions["k"] = spec.shared_dim();
  r.conventions["bootstrap"] =
      "percentile interval of resampled means, linear interpolation; lo <= hi, "
      "the mean need not be centred";
  r.conventions["resampling_axis"] = "runs";
  r.conventions["run_seed"] = "splitmix64(seed ^ splitmix64(run + 1))";
  r.conventions["split"] = "seeded shuffle of example columns, first round(split * m) align";
  Json nonstandard = Json::array();
  if (spec.source == sim::SourceKind::kGaussian) {
    nonstandard.push_back("source");
    nonstandard.push_back("units");
    nonstandard.push_back("examples");
  }
  nonstandard.push_back("split");
  if (spec.noise_sigma > 0.0) nonstandard.push_back("noise");
  if (spec.networks != 10) nonstandard.push_back("networks");
  if (spec.runs != 50) nonstandard.push_back("runs");
  r.conventions["nonstandard_settings"] = nonstandard;

  const Json depends = Json::array({"vectorization", "normalization", "k", "bootstrap"});
  for (const auto& agg : result.aggregates) {
    Json entry = ci_to_json(agg.ci, "runs");
    entry["conventions"] = agg.name == "variance_explained"
                               ? Json::array({"normalization", "k", "bootstrap"})
                               : depends;
    r.metrics[agg.name] = entry;
  }
  r.metrics["pearson_spearman_abs_diff"] =
      std::abs(result.aggregate("shared_pearson").ci.mean -
               result.aggregate("shared_spearman").ci.mean);
  bool shared_beats_native = true;
  for (const auto& m : result.runs) {
    shared_beats_native = shared_beats_native && m.shared_pearson > m.native_pearson;
  }
  r.metrics["shared_above_native_every_run"] = shared_beats_native;
  r.metrics["degenerate_ci"] = result.degenerate_ci;

  Json runs = Json::array();
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& m = result.runs[i];
    Json run;
    run["run"] = i;
    run["seed"] = sim::derive_seed(spec.seed, i);
    run["shared_pearson"] = m.shared_pearson;
    run["shared_spearman"] = m.shared_spearman;
    run["native_pearson"] = m.native_pearson;
    run["native_spearman"] = m.native_spearman;
    run["variance_explained"] = m.variance_explained;
    run["iterations"] = m.iterations;
    run["converged"] = m.converged;
    run["final_objective"] = m.final_objective;
    runs.push_back(run);
  }
  r.metrics["runs"] = runs;

  r.provenance["seed"] = spec.seed;
  r.provenance["toolkit_version"] = toolkit_version();
  return r;
}

namespace {

Json pairs_to_json(const std::vector<PairCorrelation>& pairs,
                   const std::vector<std::string>& ids) {
  Json out = Json::array();
  for (const auto& p : pairs) {
    out.push_back({{"first", ids[p.first]}, {"second", ids[p.second]}, {"value", p.value}});
  }
  return out;
}

}  // namespace

Report evaluation_report(std::span<const LayerEvaluation> layers, Json spec,
                         const EvaluationSettings& settings) {
  Report r;
  r.kind = "evaluation";
  r.spec = std::move(spec);
  r.spec["resamples"] = settings.resamples;
  r.spec["level"] = settings.level;
  r.spec["seed"] = settings.seed;

  r.conventions["vectorization"] = kVectorizationRule;
  Json norms = Json::object();
  Json k = Json::object();
  Json units = Json::object();
  for (const auto& ev : layers) {
    norms[ev.layer_id] = to_string(ev.normalization);
    k[ev.layer_id] = ev.k;
    units[ev.layer_id] = ev.units;
  }
  r.conventions["normalization"] = norms;
  r.conventions["k"] = k;
  r.conventions["units"] = units;
  r.conventions["bootstrap"] =
      "percentile interval of resampled means, linear interpolation; lo <= hi, "
      "the mean need not be centred";
  r.conventions["resampling_axis"] =
      "unordered network pairs for correlations, networks for variance explained";
  r.conventions["native_baseline"] = "null when unit counts differ across networks";

  const Json depends = Json::array({"vectorization", "normalization", "k", "bootstrap"});
  Json per_layer = Json::object();
  for (const auto& ev : layers) {
    Json m;
    m["networks"] = ev.network_ids;
    m["examples"] = ev.examples;
    m["shared_pearson"] = ev.shared_pearson;
    m["shared_spearman"] = ev.shared_spearman;
    m["native_pearson"] = ev.native_pearson ? Json(*ev.native_pearson) : Json(nullptr);
    m["native_spearman"] = ev.native_spearman ? Json(*ev.native_spearman) : Json(nullptr);
    m["variance_explained"] = ev.variance_explained;
    m["network_variance_explained"] = ev.network_variance_explained;
    m["wrsm_consistency"] = ev.consistency.mean;

    Json ci = ci_to_json(ev.shared_ci, "network pairs");
    ci["conventions"] = depends;
    m["shared_pearson_pairs_ci"] = ci;
    if (ev.native_ci) {
      ci = ci_to_json(*ev.native_ci, "network pairs");
      ci["conventions"] = depends;
      m["native_pearson_pairs_ci"] = ci;
    } else {
      m["native_pearson_pairs_ci"] = nullptr;
    }
    ci = ci_to_json(ev.consistency_ci, "network pairs");
    ci["conventions"] = depends;
    m["wrsm_consistency_ci"] = ci;
    ci = ci_to_json(ev.variance_explained_ci, "networks");
    ci["conventions"] = Json::array({"normalization", "k", "bootstrap"});
    m["variance_explained_ci"] = ci;

    m["shared_pairs"] = pairs_to_json(ev.shared_pairs, ev.network_ids);
    m["native_pairs"] = pairs_to_json(ev.native_pairs, ev.network_ids);
    m["wrsm_consistency_pairs"] = pairs_to_json(ev.consistency.pairs, ev.network_ids);
    per_layer[ev.layer_id] = m;
  }
  r.metrics["layers"] = per_layer;

  r.provenance["seed"] = settings.seed;
  r.provenance["toolkit_version"] = toolkit_version();
  return r;
}

Json model_metadata(const SrmModel& model) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "srm-model";
  j["k"] = model.k;
  j["layer_id"] = model.layer_id;
  j["network_ids"] = model.network_ids;
  Json units = Json::array();
  for (const auto& w : model.transforms) units.push_back(w.rows());
  j["units"] = units;
  j["train_examples"] = model.shared.cols();
  j["normalization"] = to_string(model.normalization);
  j["tol"] = model.tol;
  j["max_iters"] = model.max_iters;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["final_objective"] = model.final_objective();
  j["fit_trace"] = model.fit_trace;
  j["warnings"] = model.warnings;
  Json files = Json::array();
  for (std::size_t i = 0; i < model.transforms.size(); ++i) files.push_back(transform_file(i));
  j["transform_files"] = files;
  j["shared_file"] = "shared.amat";
  j["toolkit_version"] = toolkit_version();
  return j;
}

void save_model(const SrmModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < model.transforms.size(); ++i) {
    write_matrix(model.transforms[i], dir / transform_file(i));
  }
  write_matrix(model.shared, dir / "shared.amat");
  write_file_atomic(dir / kModelMetadataFile, model_metadata(model).dump(2) + "\n");
}

SrmModel load_model(const fs::path& dir) {
  const fs::path meta_path = dir / kModelMetadataFile;
  if (!fs::exists(meta_path)) {
    throw Error(ErrorCode::kMissingFile, "no " + std::string(kModelMetadataFile) +
                                             " in model directory " + dir.string());
  }
  Json meta;
  try {
    meta = Json::parse(read_file(meta_path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfigParse, meta_path.string() + ": " + e.what());
  }

  SrmModel model;
  try {
    model.k = meta.at("k").get<Index>();
    model.layer_id = meta.at("layer_id").get<std::string>();
    model.network_ids = meta.at("network_ids").get<std::vector<std::string>>();
    model.normalization = parse_normalization(meta.at("normalization").get<std::string>());
    model.tol = meta.at("tol").get<double>();
    model.max_iters = meta.at("max_iters").get<int>();
    model.iterations = meta.at("iterations").get<int>();
    model.converged = meta.at("converged").get<bool>();
    model.fit_trace = meta.at("fit_trace").get<std::vector<double>>();
    model.warnings = meta.value("warnings", std::vector<std::string>{});
    for (const auto& f : meta.at("transform_files")) {
      model.transforms.push_back(read_matrix(dir / f.get<std::string>()));
    }
    model.shared = read_matrix(dir / meta.at("shared_file").get<std::string>());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfigParse, meta_path.string() + ": " + e.what());
  }

  if (model.transforms.size() != model.network_ids.size()) {
    throw Error(ErrorCode::kNetworkCountMismatch,
                meta_path.string() + ": transform and network counts differ");
  }
  for (const auto& w : model.transforms) {
    if (w.cols() != model.k) {
      throw Error(ErrorCode::kDimensionMismatch,
                  meta_path.string() + ": a transform does not have k columns");
    }
  }
  if (model.shared.rows() != model.k) {
    throw Error(ErrorCode::kDimensionMismatch,
                meta_path.string() + ": shared response does not have k rows");
  }
  return model;
}

}  // namespace srmkit::io

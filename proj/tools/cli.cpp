#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srmkit/errors.hpp"
#include "srmkit/evaluate.hpp"
#include "srmkit/io.hpp"
#include "srmkit/report.hpp"
#include "srmkit/rsm.hpp"
#include "srmkit/simkit.hpp"
#include "srmkit/srm.hpp"

namespace srmkit::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

const std::vector<std::string> kNormalizations{"unit-norm", "pearson"};
const std::vector<std::string> kFormats{"binary", "csv"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Layers picked by --layer, or all of them in manifest order.
std::vector<std::string> chosen_layers(const std::vector<ActivityMatrix>& mats,
                                       const std::string& layer) {
  const auto all = io::layers_of(mats);
  if (layer.empty()) return all;
  if (std::find(all.begin(), all.end(), layer) == all.end()) {
    throw Error(ErrorCode::kInvalidSpec, "layer '" + layer + "' is not in the manifest");
  }
  return {layer};
}

Index min_units(const std::vector<ActivityMatrix>& mats) {
  Index n = mats.front().units();
  for (const auto& a : mats) n = std::min(n, a.units());
  return n;
}

// A model directory holds model.json itself, or one subdirectory per layer.
std::vector<fs::path> model_dirs(const fs::path& root) {
  if (fs::exists(root / io::kModelMetadataFile)) return {root};
  std::vector<fs::path> dirs;
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (fs::exists(entry.path() / io::kModelMetadataFile)) dirs.push_back(entry.path());
    }
  }
  if (dirs.empty()) {
    throw Error(ErrorCode::kMissingFile, "no model found under " + root.string());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  Index units = sim::kDefaultUnits;
  Index examples = sim::kDefaultExamples;
  int networks = sim::kDefaultNetworks;
  std::string family = "orthogonal";
  std::string source_matrix;
  double noise = 0.0;
  double split = 0.5;
  int runs = sim::kDefaultRuns;
  std::uint64_t seed = 0;
  Index k = 0;
  int max_iters = kDefaultMaxIters;
  double tol = kDefaultTol;
  int resamples = stats::kDefaultResamples;
  double level = stats::kDefaultLevel;
  std::string normalization = "unit-norm";
  int threads = 1;
  std::string out;
  bool emit_rsms = false;
  bool export_activations = false;
  std::string format = "binary";
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  app.add_option("--config", a.config,
                 "key = value file (units, examples, networks, family, source, source_path, "
                 "noise, split, runs, seed, k, max_iters, tol, resamples, level, "
                 "normalization); flags given on the command line override it")
      ->check(CLI::ExistingFile);
  app.add_option("--units", a.units, "units per network (n)")->capture_default_str();
  app.add_option("--examples", a.examples, "examples per network (m)")->capture_default_str();
  app.add_option("--networks", a.networks, "number of networks (N)")->capture_default_str();
  app.add_option("--family", a.family, "mixing matrices")
      ->check(CLI::IsMember({"orthogonal", "permutation"}))
      ->capture_default_str();
  app.add_option("--source-matrix", a.source_matrix,
                 "matrix file (units x examples) used as the shared source instead of "
                 "Gaussian noise");
  app.add_option("--noise", a.noise, "std of additive Gaussian noise")->capture_default_str();
  app.add_option("--split", a.split, "fraction of examples used for alignment")
      ->capture_default_str();
  app.add_option("--runs", a.runs, "independent simulation runs")->capture_default_str();
  app.add_option("--seed", a.seed, "master seed")->capture_default_str();
  app.add_option("--k", a.k, "shared dimension (default: units)");
  app.add_option("--max-iters", a.max_iters, "SRM iteration cap")->capture_default_str();
  app.add_option("--tol", a.tol, "relative objective change that stops the fit")
      ->capture_default_str();
  app.add_option("--resamples", a.resamples, "bootstrap resamples")->capture_default_str();
  app.add_option("--level", a.level, "bootstrap interval level")->capture_default_str();
  app.add_option("--normalization", a.normalization, "column normalization")
      ->check(CLI::IsMember(kNormalizations))
      ->capture_default_str();
  app.add_option("--threads", a.threads, "worker threads (results do not depend on it)")
      ->capture_default_str();
  app.add_option("--out", a.out, "output directory")->required();
  app.add_flag("--emit-rsms", a.emit_rsms,
               "write run 0's averaged wRSM, shared iRSM and native iRSM");
  app.add_flag("--export-activations", a.export_activations,
               "write run 0's alignment and test activations with manifests");
  app.add_option("--matrix-format", a.format, "format of written matrices")
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();
}

int do_simulate(const CLI::App& app, const SimulateArgs& a, std::ostream& out) {
  sim::SimulationSpec spec;
  fs::path config_dir;
  if (!a.config.empty()) {
    spec = sim::parse_simulation_config(io::read_file(a.config));
    config_dir = fs::path(a.config).parent_path();
  }
  const auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--units")) spec.units = a.units;
  if (given("--examples")) spec.examples = a.examples;
  if (given("--networks")) spec.networks = a.networks;
  if (given("--family")) {
    spec.family = a.family == "permutation" ? sim::TransformFamily::kPermutation
                                            : sim::TransformFamily::kOrthogonal;
  }
  if (given("--noise")) spec.noise_sigma = a.noise;
  if (given("--split")) spec.split_fraction = a.split;
  if (given("--runs")) spec.runs = a.runs;
  if (given("--seed")) spec.seed = a.seed;
  if (given("--k")) spec.k = a.k;
  if (given("--max-iters")) spec.max_iters = a.max_iters;
  if (given("--tol")) spec.tol = a.tol;
  if (given("--resamples")) spec.resamples = a.resamples;
  if (given("--level")) spec.level = a.level;
  if (given("--normalization")) spec.normalization = parse_normalization(a.normalization);

  if (given("--source-matrix")) {
    spec.source = sim::SourceKind::kSupplied;
    spec.source_path = a.source_matrix;
    spec.supplied_source = io::read_matrix(a.source_matrix);
  } else if (spec.source == sim::SourceKind::kSupplied) {
    if (spec.source_path.empty()) {
      throw Error(ErrorCode::kInvalidSpec, "source = supplied needs source_path");
    }
    fs::path p = spec.source_path;
    if (p.is_relative()) p = config_dir / p;
    spec.supplied_source = io::read_matrix(p);
  }
  // A supplied source fixes the dimensions unless they were set explicitly.
  if (spec.source == sim::SourceKind::kSupplied && !given("--units") && !given("--examples")) {
    spec.units = spec.supplied_source.rows();
    spec.examples = spec.supplied_source.cols();
  }
  sim::validate(spec);

  sim::SimulationOptions options;
  options.threads = a.threads;
  options.keep_first_run_rsms = a.emit_rsms;
  const sim::SimulationResult result = sim::run_simulation(spec, options);

  const fs::path dir = a.out;
  fs::create_directories(dir);
  io::Report report = io::simulation_report(result);
  report.generated_at = io::utc_timestamp();
  io::write_report(report, dir / "report.json");

  const auto format = io::parse_matrix_format(a.format);
  const auto ext = std::string(io::extension(format));
  if (a.emit_rsms && result.first_run_rsms) {
    const auto& r = *result.first_run_rsms;
    io::write_matrix(r.native_within.values, dir / ("wrsm" + ext), format);
    io::write_matrix(r.shared_inter.values, dir / ("shared_irsm" + ext), format);
    io::write_matrix(r.native_inter.values, dir / ("native_irsm" + ext), format);
  }
  if (a.export_activations) {
    const sim::SimulationRun run = sim::generate_run(spec, 0);
    for (const auto& [part, mats] : {std::pair{"align", &run.alignment},
                                     std::pair{"test", &run.test}}) {
      const fs::path sub = dir / "activations" / part;
      fs::create_directories(sub);
      std::vector<io::ManifestEntry> entries;
      for (const auto& m : *mats) {
        const std::string file = m.network_id + ext;
        io::write_matrix(m.data, sub / file, format);
        entries.push_back({m.network_id, m.layer_id, file, 0});
      }
      io::write_file_atomic(sub / "manifest.txt", io::format_manifest(entries));
    }
  }

  for (const auto& agg : result.aggregates) {
    out << agg.name << " " << fmt(agg.ci.mean) << " [" << fmt(agg.ci.lo) << ", "
        << fmt(agg.ci.hi) << "]\n";
  }
  out << "runs " << result.runs.size() << (result.degenerate_ci ? " (degenerate CI)" : "")
      << ", report " << (dir / "report.json").string() << "\n";
  return kOk;
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
  std::string manifest;
  std::string layer;
  Index k = 0;
  int max_iters = kDefaultMaxIters;
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  std::string init = "svd";
  std::string normalization = "unit-norm";
  int threads = 1;
  std::string out;
};

void add_fit(CLI::App& app, FitArgs& a) {
  app.add_option("--manifest", a.manifest, "activation manifest (network, layer, path)")
      ->required();
  app.add_option("--layer", a.layer,
                 "layer to fit (default: every layer, one model subdirectory each)");
  app.add_option("--k", a.k, "shared dimension (default: smallest unit count of the layer)");
  app.add_option("--max-iters", a.max_iters, "iteration cap")->capture_default_str();
  app.add_option("--tol", a.tol, "relative objective change that stops the fit")
      ->capture_default_str();
  app.add_option("--seed", a.seed, "seed for --init random")->capture_default_str();
  app.add_option("--init", a.init, "initial shared response")
      ->check(CLI::IsMember({"svd", "random"}))
      ->capture_default_str();
  app.add_option("--normalization", a.normalization, "column normalization")
      ->check(CLI::IsMember(kNormalizations))
      ->capture_default_str();
  app.add_option("--threads", a.threads, "worker threads (results do not depend on it)")
      ->capture_default_str();
  app.add_option("--out", a.out, "model directory")->required();
}

int do_fit(const CLI::App& app, const FitArgs& a, std::ostream& out) {
  const auto mats = io::ingest_activations(a.manifest);
  const auto layers = chosen_layers(mats, a.layer);
  const bool nested = layers.size() > 1;
  for (const auto& layer : layers) {
    const auto layer_mats = io::select_layer(mats, layer);
    SrmOptions options;
    options.k = app.count("--k") ? a.k : min_units(layer_mats);
    options.max_iters = a.max_iters;
    options.tol = a.tol;
    options.seed = a.seed;
    options.init = a.init == "random" ? SrmInit::kRandomOrthogonal : SrmInit::kFirstNetworkSvd;
    options.normalization = parse_normalization(a.normalization);
    options.threads = a.threads;
    const SrmModel model = fit_srm(layer_mats, options);
    const fs::path dir = nested ? fs::path(a.out) / layer : fs::path(a.out);
    io::save_model(model, dir);
    out << "layer " << layer << ": k=" << model.k << " iterations=" << model.iterations
        << " final_objective=" << fmt(model.final_objective())
        << " converged=" << (model.converged ? "true" : "false") << "\n";
    for (const auto& w : model.warnings) out << "  warning: " << w << "\n";
  }
  return kOk;
}

// ---- transform --------------------------------------------------------------

struct TransformArgs {
  std::string model;
  std::string manifest;
  std::string out;
  std::string format = "binary";
};

void add_transform(CLI::App& app, TransformArgs& a) {
  app.add_option("--model", a.model, "model directory written by fit")->required();
  app.add_option("--manifest", a.manifest, "activations to project")->required();
  app.add_option("--out", a.out, "output directory")->required();
  app.add_option("--matrix-format", a.format, "format of written matrices")
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();
}

int do_transform(const TransformArgs& a, std::ostream& out) {
  const auto mats = io::ingest_activations(a.manifest);
  const auto format = io::parse_matrix_format(a.format);
  for (const auto& dir : model_dirs(a.model)) {
    const SrmModel model = io::load_model(dir);
    const auto layer_mats = match_model_networks(model, io::select_layer(mats, model.layer_id));
    const auto shared = transform(model, layer_mats);
    const fs::path sub = fs::path(a.out) / model.layer_id;
    fs::create_directories(sub);
    for (std::size_t i = 0; i < shared.size(); ++i) {
      io::write_matrix(shared[i],
                       sub / (model.network_ids[i] + std::string(io::extension(format))), format);
    }
    out << "layer " << model.layer_id << ": " << shared.size() << " networks projected to k="
        << model.k << "\n";
  }
  return kOk;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string manifest;
  std::string layer;
  std::string report;
  int resamples = stats::kDefaultResamples;
  double level = stats::kDefaultLevel;
  std::uint64_t seed = 0;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  app.add_option("--model", a.model,
                 "model directory written by fit (one layer, or one subdirectory per layer)")
      ->required();
  app.add_option("--manifest", a.manifest, "held-out activations")->required();
  app.add_option("--layer", a.layer, "evaluate only this layer (default: every model layer)");
  app.add_option("--report", a.report, "report file to write")->required();
  app.add_option("--resamples", a.resamples, "bootstrap resamples")->capture_default_str();
  app.add_option("--level", a.level, "bootstrap interval level")->capture_default_str();
  app.add_option("--seed", a.seed, "bootstrap seed")->capture_default_str();
}

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto mats = io::ingest_activations(a.manifest);
  EvaluationSettings settings;
  settings.resamples = a.resamples;
  settings.level = a.level;
  settings.seed = a.seed;

  std::vector<LayerEvaluation> evals;
  Json layers = Json::array();
  for (const auto& dir : model_dirs(a.model)) {
    const SrmModel model = io::load_model(dir);
    if (!a.layer.empty() && model.layer_id != a.layer) continue;
    const auto layer_mats = io::select_layer(mats, model.layer_id);
    if (layer_mats.empty()) {
      throw Error(ErrorCode::kInvalidSpec,
                  "layer '" + model.layer_id + "' of the model is not in the manifest");
    }
    evals.push_back(evaluate_layer(model, match_model_networks(model, layer_mats), settings));
    layers.push_back(model.layer_id);
  }
  if (evals.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "model has no layer '" + a.layer + "'");
  }

  Json spec;
  spec["model"] = a.model;
  spec["manifest"] = a.manifest;
  spec["layers"] = layers;
  io::Report report = io::evaluation_report(evals, spec, settings);
  report.generated_at = io::utc_timestamp();
  const fs::path path = a.report;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  io::write_report(report, path);

  for (const auto& ev : evals) {
    out << "layer " << ev.layer_id << ": shared_pearson=" << fmt(ev.shared_pearson)
        << " shared_spearman=" << fmt(ev.shared_spearman) << " native_pearson="
        << (ev.native_pearson ? fmt(*ev.native_pearson) : "null")
        << " variance_explained=" << fmt(ev.variance_explained)
        << " wrsm_consistency=" << fmt(ev.consistency.mean) << "\n";
  }
  return kOk;
}

// ---- rsm --------------------------------------------------------------------

struct RsmArgs {
  std::string manifest;
  std::string layer;
  std::string kind = "both";
  std::string normalization = "unit-norm";
  std::string out;
  std::string format = "binary";
};

void add_rsm(CLI::App& app, RsmArgs& a) {
  app.add_option("--manifest", a.manifest, "activation manifest")->required();
  app.add_option("--layer", a.layer, "layer to export (default: every layer)");
  app.add_option("--kind", a.kind,
                 "within: per-network wRSMs plus their average; inter: averaged iRSM")
      ->check(CLI::IsMember({"within", "inter", "both"}))
      ->capture_default_str();
  app.add_option("--normalization", a.normalization, "column normalization")
      ->check(CLI::IsMember(kNormalizations))
      ->capture_default_str();
  app.add_option("--out", a.out, "output directory, one subdirectory per layer")->required();
  app.add_option("--matrix-format", a.format, "format of written matrices")
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();
}

int do_rsm(const RsmArgs& a, std::ostream& out) {
  const auto mats = io::ingest_activations(a.manifest);
  const auto policy = parse_normalization(a.normalization);
  const auto format = io::parse_matrix_format(a.format);
  const std::string ext(io::extension(format));
  for (const auto& layer : chosen_layers(mats, a.layer)) {
    const auto layer_mats = io::select_layer(mats, layer);
    const fs::path sub = fs::path(a.out) / layer;
    fs::create_directories(sub);
    int files = 0;
    if (a.kind != "inter") {
      std::vector<Rsm> within;
      for (const auto& m : layer_mats) {
        within.push_back(within_rsm(m, policy));
        io::write_matrix(within.back().values, sub / ("within_" + m.network_id + ext), format);
        ++files;
      }
      io::write_matrix(average_rsm(within).values, sub / ("within_average" + ext), format);
      ++files;
    }
    if (a.kind != "within") {
      const auto data = data_of(layer_mats);
      io::write_matrix(averaged_inter_rsm(data, policy).values, sub / ("inter_average" + ext),
                       format);
      ++files;
    }
    out << "layer " << layer << ": " << files << " files in " << sub.string() << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shared response model alignment and RSM analysis for neural network "
               "activity"};
  app.name(args.empty() ? "srmkit" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::toolkit_version()));

  SimulateArgs sim_args;
  FitArgs fit_args;
  TransformArgs transform_args;
  EvaluateArgs eval_args;
  RsmArgs rsm_args;
  auto* simulate = app.add_subcommand("simulate", "run the synthetic recovery experiment");
  auto* fit = app.add_subcommand("fit", "fit an SRM per layer from a manifest");
  auto* trans = app.add_subcommand("transform", "project activations into the shared space");
  auto* evaluate = app.add_subcommand("evaluate", "score a fitted model on held-out data");
  auto* rsm = app.add_subcommand("rsm", "export within and inter-network RSMs");
  add_simulate(*simulate, sim_args);
  add_fit(*fit, fit_args);
  add_transform(*trans, transform_args);
  add_evaluate(*evaluate, eval_args);
  add_rsm(*rsm, rsm_args);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("srmkit");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailure;
  }

  try {
    if (*simulate) return do_simulate(*simulate, sim_args, out);
    if (*fit) return do_fit(*fit, fit_args, out);
    if (*trans) return do_transform(transform_args, out);
    if (*evaluate) return do_evaluate(eval_args, out);
    if (*rsm) return do_rsm(rsm_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? kValidationFailure : kRuntimeFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace srmkit::cli

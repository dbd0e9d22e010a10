#include "srmkit/simkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "srmkit/errors.hpp"

namespace srmkit::sim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent streams within one run.
std::uint64_t source_stream(std::uint64_t run_seed) { return derive_seed(run_seed, 0); }
std::uint64_t mixing_stream(std::uint64_t run_seed, int i) {
  return derive_seed(run_seed, 1 + static_cast<std::uint64_t>(i));
}
std::uint64_t noise_stream(std::uint64_t run_seed, int networks, int i) {
  return derive_seed(run_seed, 1 + static_cast<std::uint64_t>(networks + i));
}
std::uint64_t split_stream(std::uint64_t run_seed, int networks) {
  return derive_seed(run_seed, 1 + 2 * static_cast<std::uint64_t>(networks));
}

Index alignment_count(const SimulationSpec& spec) {
  return static_cast<Index>(
      std::llround(spec.split_fraction * static_cast<double>(spec.examples)));
}

void fail(const std::string& message) { throw Error(ErrorCode::kInvalidSpec, message); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& value, int line, const std::string& key) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kConfigParse, "line " + std::to_string(line) + ": '" +
                                             value + "' is not a valid value for " +
                                             key);
  }
  return out;
}

}  // namespace

std::string_view to_string(TransformFamily family) {
  return family == TransformFamily::kOrthogonal ? "orthogonal" : "permutation";
}

std::string_view to_string(SourceKind source) {
  return source == SourceKind::kGaussian ? "gaussian" : "supplied";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

void validate(const SimulationSpec& spec) {
  if (spec.units < 1) fail("units must be >= 1");
  if (spec.examples < 6) fail("examples must be >= 6 (3 per split)");
  if (spec.networks < 2) fail("networks must be >= 2");
  if (spec.runs < 1) fail("runs must be >= 1");
  if (!(spec.split_fraction > 0.0 && spec.split_fraction < 1.0)) {
    fail("split must lie strictly between 0 and 1");
  }
  const Index n_align = alignment_count(spec);
  if (n_align < 3 || spec.examples - n_align < 3) {
    fail("split leaves fewer than 3 examples in the alignment or test set");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    fail("noise must be a finite value >= 0");
  }
  const Index k = spec.shared_dim();
  if (k < 1 || k > spec.units || k > n_align) {
    fail("k = " + std::to_string(k) + " must satisfy 1 <= k <= units (" +
         std::to_string(spec.units) + ") and k <= alignment examples (" +
         std::to_string(n_align) + ")");
  }
  if (spec.max_iters < 1) fail("max_iters must be >= 1");
  if (!(spec.tol >= 0.0)) fail("tol must be >= 0");
  if (spec.resamples < 1) fail("resamples must be >= 1");
  if (!(spec.level > 0.0 && spec.level < 1.0)) fail("level must lie in (0, 1)");
  if (spec.source == SourceKind::kSupplied) {
    if (spec.supplied_source.rows() != spec.units ||
        spec.supplied_source.cols() != spec.examples) {
      fail("supplied source is " + std::to_string(spec.supplied_source.rows()) + "x" +
           std::to_string(spec.supplied_source.cols()) + " but the spec says " +
           std::to_string(spec.units) + "x" + std::to_string(spec.examples));
    }
    if (!spec.supplied_source.allFinite()) fail("supplied source has non-finite entries");
  }
}

SimulationSpec parse_simulation_config(std::string_view text, SimulationSpec base) {
  SimulationSpec spec = std::move(base);
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfigParse, where + "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::kConfigParse, where + "empty key or value");
    }
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::kConfigParse, where + "duplicate key '" + key + "'");
    }

    if (key == "units") {
      spec.units = parse_number<Index>(value, line_no, key);
    } else if (key == "examples") {
      spec.examples = parse_number<Index>(value, line_no, key);
    } else if (key == "networks") {
      spec.networks = parse_number<int>(value, line_no, key);
    } else if (key == "family") {
      if (value == "orthogonal") spec.family = TransformFamily::kOrthogonal;
      else if (value == "permutation") spec.family = TransformFamily::kPermutation;
      else throw Error(ErrorCode::kConfigParse, where + "family must be orthogonal or permutation");
    } else if (key == "source") {
      if (value == "gaussian") spec.source = SourceKind::kGaussian;
      else if (value == "supplied") spec.source = SourceKind::kSupplied;
      else throw Error(ErrorCode::kConfigParse, where + "source must be gaussian or supplied");
    } else if (key == "source_path") {
      spec.source_path = value;
    } else if (key == "noise") {
      spec.noise_sigma = parse_number<double>(value, line_no, key);
    } else if (key == "split") {
      spec.split_fraction = parse_number<double>(value, line_no, key);
    } else if (key == "runs") {
      spec.runs = parse_number<int>(value, line_no, key);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(value, line_no, key);
    } else if (key == "k") {
      spec.k = parse_number<Index>(value, line_no, key);
    } else if (key == "max_iters") {
      spec.max_iters = parse_number<int>(value, line_no, key);
    } else if (key == "tol") {
      spec.tol = parse_number<double>(value, line_no, key);
    } else if (key == "resamples") {
      spec.resamples = parse_number<int>(value, line_no, key);
    } else if (key == "level") {
      spec.level = parse_number<double>(value, line_no, key);
    } else if (key == "normalization") {
      try {
        spec.normalization = parse_normalization(value);
      } catch (const Error& e) {
        throw Error(ErrorCode::kConfigParse, where + e.what());
      }
    } else {
      throw Error(ErrorCode::kConfigParse, where + "unknown key '" + key + "'");
    }
  }
  return spec;
}

SimulationRun generate_run(const SimulationSpec& spec, int run_index) {
  validate(spec);
  const std::uint64_t run_seed =
      derive_seed(spec.seed, static_cast<std::uint64_t>(run_index));
  const Index n = spec.units;
  const Index m = spec.examples;

  SimulationRun run;
  if (spec.source == SourceKind::kSupplied) {
    run.source = spec.supplied_source;
  } else {
    std::mt19937_64 rng(source_stream(run_seed));
    std::normal_distribution<double> normal(0.0, 1.0);
    run.source.resize(n, m);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) run.source(i, j) = normal(rng);
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  {
    std::mt19937_64 rng(split_stream(run_seed, spec.networks));
    for (Index i = m - 1; i > 0; --i) {
      std::uniform_int_distribution<Index> pick(0, i);
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(pick(rng))]);
    }
  }
  const auto n_align = static_cast<std::ptrdiff_t>(alignment_count(spec));
  run.alignment_columns.assign(order.begin(), order.begin() + n_align);
  run.test_columns.assign(order.begin() + n_align, order.end());
  std::sort(run.alignment_columns.begin(), run.alignment_columns.end());
  std::sort(run.test_columns.begin(), run.test_columns.end());

  const auto pick_columns = [](const Matrix& x, const std::vector<Index>& cols) {
    Matrix out(x.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = x.col(cols[j]);
    return out;
  };

  for (int i = 0; i < spec.networks; ++i) {
    const std::uint64_t q_seed = mixing_stream(run_seed, i);
    Matrix q = spec.family == TransformFamily::kOrthogonal ? random_orthogonal(n, q_seed)
                                                           : random_permutation(n, q_seed);
    Matrix x = q * run.source;
    if (spec.noise_sigma > 0.0) {
      std::mt19937_64 rng(noise_stream(run_seed, spec.networks, i));
      std::normal_distribution<double> normal(0.0, spec.noise_sigma);
      for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < m; ++c) x(r, c) += normal(rng);
      }
    }
    char id[16];
    std::snprintf(id, sizeof id, "net%02d", i);
    run.alignment.push_back({id, "sim", pick_columns(x, run.alignment_columns)});
    run.test.push_back({id, "sim", pick_columns(x, run.test_columns)});
    run.mixing.push_back(std::move(q));
  }
  return run;
}

RunMetrics evaluate_run(std::span<const ActivityMatrix> alignment,
                        std::span<const ActivityMatrix> test, Index k,
                        const EvaluationOptions& options, RunRsms* rsms) {
  SrmOptions fit_options;
  fit_options.k = k;
  fit_options.max_iters = options.max_iters;
  fit_options.tol = options.tol;
  fit_options.normalization = options.normalization;
  fit_options.threads = options.threads;
  const SrmModel model = fit_srm(alignment, fit_options);

  const std::vector<Matrix> shared = transform(model, test);
  const std::vector<Matrix> native = data_of(test);

  const Rsm wrsm = averaged_within_rsm(native, options.normalization);
  const Rsm shared_irsm = averaged_inter_rsm(shared, options.normalization);
  const Rsm native_irsm = averaged_inter_rsm(native, options.normalization);

  RunMetrics metrics;
  metrics.shared_pearson = rsm_correlation(shared_irsm, wrsm, CorrelationMethod::kPearson);
  metrics.shared_spearman = rsm_correlation(shared_irsm, wrsm, CorrelationMethod::kSpearman);
  metrics.native_pearson = rsm_correlation(native_irsm, wrsm, CorrelationMethod::kPearson);
  metrics.native_spearman = rsm_correlation(native_irsm, wrsm, CorrelationMethod::kSpearman);
  metrics.variance_explained = variance_explained(model, test);
  metrics.iterations = model.iterations;
  metrics.converged = model.converged;
  metrics.final_objective = model.final_objective();

  if (rsms != nullptr) *rsms = RunRsms{wrsm, shared_irsm, native_irsm};
  return metrics;
}

const MetricSummary& SimulationResult::aggregate(std::string_view name) const {
  for (const auto& a : aggregates) {
    if (a.name == name) return a;
  }
  throw Error(ErrorCode::kInvalidSpec, "no aggregate named " + std::string(name));
}

SimulationResult run_simulation(const SimulationSpec& spec,
                                const SimulationOptions& options) {
  validate(spec);
  const auto runs = static_cast<std::size_t>(spec.runs);
  std::vector<RunMetrics> metrics(runs);
  std::vector<std::exception_ptr> failures(runs);
  std::optional<RunRsms> first_rsms;

  EvaluationOptions eval;
  eval.max_iters = spec.max_iters;
  eval.tol = spec.tol;
  eval.normalization = spec.normalization;

  const auto do_run = [&](std::size_t r) {
    try {
      const SimulationRun run = generate_run(spec, static_cast<int>(r));
      RunRsms rsms;
      const bool keep = options.keep_first_run_rsms && r == 0;
      metrics[r] = evaluate_run(run.alignment, run.test, spec.shared_dim(), eval,
                                keep ? &rsms : nullptr);
      if (keep) first_rsms = std::move(rsms);
    } catch (...) {
      failures[r] = std::current_exception();
    }
  };

  const auto threads = static_cast<std::size_t>(
      std::clamp<int>(options.threads, 1, static_cast<int>(runs)));
  if (threads == 1) {
    for (std::size_t r = 0; r < runs; ++r) do_run(r);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < runs; r += threads) do_run(r);
      });
    }
  }

  for (std::size_t r = 0; r < runs; ++r) {
    if (!failures[r]) continue;
    try {
      std::rethrow_exception(failures[r]);
    } catch (const Error& e) {
      throw Error(e.code(), "simulation run " + std::to_string(r) + " failed: " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kIo, "simulation run " + std::to_string(r) + " failed: " + e.what());
    }
  }

  SimulationResult result;
  result.spec = spec;
  result.runs = std::move(metrics);
  result.first_run_rsms = std::move(first_rsms);

  using Getter = double (*)(const RunMetrics&);
  const std::pair<const char*, Getter> fields[] = {
      {"shared_pearson", [](const RunMetrics& m) { return m.shared_pearson; }},
      {"shared_spearman", [](const RunMetrics& m) { return m.shared_spearman; }},
      {"native_pearson", [](const RunMetrics& m) { return m.native_pearson; }},
      {"native_spearman", [](const RunMetrics& m) { return m.native_spearman; }},
      {"variance_explained", [](const RunMetrics& m) { return m.variance_explained; }},
  };
  const std::uint64_t bootstrap_seed = derive_seed(spec.seed, 0xB0075EEDULL);
  std::uint64_t index = 0;
  for (const auto& [name, get] : fields) {
    std::vector<double> values;
    values.reserve(result.runs.size());
    for (const auto& m : result.runs) values.push_back(get(m));
    auto ci = stats::bootstrap_ci(values, spec.level, spec.resamples,
                                  derive_seed(bootstrap_seed, index++));
    result.degenerate_ci = result.degenerate_ci || ci.degenerate;
    result.aggregates.push_back({name, ci});
  }
  return result;
}

}  // namespace srmkit::sim

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "srmkit/io.hpp"
#include "srmkit/matcore.hpp"
#include "srmkit/rsm.hpp"
#include "srmkit/simkit.hpp"
#include "srmkit/srm.hpp"
#include "srmkit/stats.hpp"

namespace {

using namespace srmkit;

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

void BM_ThinSvd(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix a = gaussian(n, 2 * n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(thin_svd(a));
}
BENCHMARK(BM_ThinSvd)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RandomOrthogonal(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(random_orthogonal(state.range(0), seed++));
}
BENCHMARK(BM_RandomOrthogonal)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_WithinRsm(benchmark::State& state) {
  const Matrix a = gaussian(64, state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(within_rsm(a));
}
BENCHMARK(BM_WithinRsm)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_AveragedInterRsm(benchmark::State& state) {
  std::vector<Matrix> mats;
  for (int i = 0; i < 10; ++i) mats.push_back(gaussian(64, state.range(0), 10 + i));
  for (auto _ : state) benchmark::DoNotOptimize(averaged_inter_rsm(mats));
}
BENCHMARK(BM_AveragedInterRsm)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FitSrm(benchmark::State& state) {
  const Index n = state.range(0);
  std::vector<ActivityMatrix> mats;
  for (int i = 0; i < 10; ++i) {
    mats.push_back({"n" + std::to_string(i), "L", gaussian(n, 512, 100 + i)});
  }
  SrmOptions options;
  options.k = n / 2;
  options.max_iters = 20;
  options.tol = 0.0;
  options.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(fit_srm(mats, options));
}
BENCHMARK(BM_FitSrm)->Args({32, 1})->Args({64, 1})->Args({64, 4})->Unit(benchmark::kMillisecond);

void BM_SimulationRun(benchmark::State& state) {
  sim::SimulationSpec spec;
  spec.runs = 1;
  for (auto _ : state) {
    const auto run = sim::generate_run(spec, 0);
    benchmark::DoNotOptimize(sim::evaluate_run(run.alignment, run.test, spec.shared_dim()));
  }
}
BENCHMARK(BM_SimulationRun)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  const Matrix x = gaussian(1, 50, 3);
  const std::vector<double> v(x.data(), x.data() + x.size());
  for (auto _ : state) benchmark::DoNotOptimize(stats::bootstrap_ci(v, 0.95, 10000, 1));
}
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);

void BM_BinaryRoundTrip(benchmark::State& state) {
  const Matrix m = gaussian(state.range(0), state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(io::decode_binary(io::encode_binary(m)));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * m.size() * 8);
}
BENCHMARK(BM_BinaryRoundTrip)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();

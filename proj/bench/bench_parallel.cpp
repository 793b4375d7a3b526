// Serial reference paths against their OpenMP counterparts. Argument 0 runs
// Execution::Serial, argument 1 runs Execution::Parallel.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "curvtomo/coefficients.hpp"
#include "curvtomo/measurement_sim.hpp"
#include "curvtomo/oracle.hpp"
#include "curvtomo/tomography.hpp"

using namespace curvtomo;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

std::vector<DetectorShape> shapes(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> axis(0.5, 2.0), comp(-1.0, 1.0), angle(0.0, 3.0);
  std::vector<DetectorShape> out;
  for (int k = 0; k < n; ++k)
    out.push_back(DetectorShape::from_axis_angle({axis(rng), axis(rng), axis(rng)},
                                                 {comp(rng), comp(rng), comp(rng) + 1e-3}, angle(rng)));
  return out;
}

void BM_MonteCarloOracle(benchmark::State& state) {
  OracleConfig cfg;
  cfg.mc_samples = 1'000'000;
  const auto s = shapes(1).front();
  for (auto _ : state)
    benchmark::DoNotOptimize(b_functional_mc(s, KernelKind::diff_squared_log(), cfg, mode(state)));
  state.SetItemsProcessed(state.iterations() * cfg.mc_samples);
}

void BM_FullSetBatch(benchmark::State& state) {
  const auto pool = shapes(256);
  for (auto _ : state) benchmark::DoNotOptimize(full_set_batch(pool, mode(state)));
  state.SetItemsProcessed(state.iterations() * pool.size());
}

void BM_DesignExperiment(benchmark::State& state) {
  auto pool = canonical_pool();
  for (const auto& s : shapes(49)) pool.push_back(s);
  for (auto _ : state) benchmark::DoNotOptimize(design_experiment(pool, 13, mode(state)));
}

void BM_RunCampaign(benchmark::State& state) {
  static const ExperimentDesign design = design_experiment(canonical_pool(), 15);
  const Campaign c{design, catalog({CatalogEntry::Kind::DeSitter, 0.02}), 100'000'000, 3};
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign(c, mode(state)));
}

}  // namespace

BENCHMARK(BM_MonteCarloOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FullSetBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DesignExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunCampaign)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();

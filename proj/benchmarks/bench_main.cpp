// Microbenchmarks for the simulation and inference hot paths. Fixtures are
// generated once per process with fixed seeds so numbers are comparable
// across runs.

#include <cstddef>
#include <cstdint>
#include <map>

#include <benchmark/benchmark.h>

#include "sglv/assumptions.hpp"
#include "sglv/experiments.hpp"
#include "sglv/inference.hpp"
#include "sglv/model.hpp"
#include "sglv/rng.hpp"
#include "sglv/simulate.hpp"

namespace {

using namespace sglv;

const ObservationSeries& benchmark_series(std::size_t n_obs) {
  static std::map<std::size_t, ObservationSeries> cache;
  auto it = cache.find(n_obs);
  if (it == cache.end()) {
    SimConfig config;
    config.fine_dt = 0.01;
    config.x0 = case_x0();
    RngStream rng(91, n_obs);
    it = cache.emplace(n_obs, simulate_observed(case1_params(), config,
                                                paper_schedule(n_obs), rng))
             .first;
  }
  return it->second;
}

void BM_SimulateFinePath(benchmark::State& state) {
  const ModelParams params = case1_params();
  SimConfig config;
  config.fine_dt = 0.01;
  config.x0 = case_x0();
  const double horizon = static_cast<double>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    RngStream rng(17, rep++);
    benchmark::DoNotOptimize(simulate_log_euler(params, config, horizon, rng));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(horizon / config.fine_dt));
}
BENCHMARK(BM_SimulateFinePath)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_SimulateObservedSeries(benchmark::State& state) {
  const ModelParams params = case1_params();
  SimConfig config;
  config.fine_dt = 0.01;
  config.x0 = case_x0();
  const SamplingSchedule schedule = paper_schedule(static_cast<std::size_t>(state.range(0)));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    RngStream rng(23, rep++);
    benchmark::DoNotOptimize(simulate_observed(params, config, schedule, rng));
  }
}
BENCHMARK(BM_SimulateObservedSeries)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TransitionExtraction(benchmark::State& state) {
  const ObservationSeries& series = benchmark_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(transitions_of(series));
}
BENCHMARK(BM_TransitionExtraction)->Arg(300)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_FitSglvAmle(benchmark::State& state) {
  const ObservationSeries& series = benchmark_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_sglv_amle(series));
}
BENCHMARK(BM_FitSglvAmle)->Arg(300)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_FitGlvLeastSquares(benchmark::State& state) {
  const ObservationSeries& series = benchmark_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_glv_ls(series));
}
BENCHMARK(BM_FitGlvLeastSquares)->Arg(300)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_ConfidenceIntervals(benchmark::State& state) {
  const SglvFit fit = fit_sglv_amle(benchmark_series(1000));
  for (auto _ : state) benchmark::DoNotOptimize(confidence_intervals(fit, 0.95));
}
BENCHMARK(BM_ConfidenceIntervals)->Unit(benchmark::kMicrosecond);

void BM_AssumptionChecks(benchmark::State& state) {
  const ModelParams params = case1_params();
  const Vector x0 = case_x0();
  for (auto _ : state) benchmark::DoNotOptimize(check_all(params, x0));
}
BENCHMARK(BM_AssumptionChecks)->Unit(benchmark::kMicrosecond);

void BM_CrossvalSplit(benchmark::State& state) {
  const ObservationSeries& series = benchmark_series(300);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    RngStream rng(31, rep++);
    benchmark::DoNotOptimize(run_crossval(series, 8, 2, rng, 1));
  }
}
BENCHMARK(BM_CrossvalSplit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

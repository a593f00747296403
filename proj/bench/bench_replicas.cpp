// Serial reference versus OpenMP replica loop. Set CHEMOSTAT_WORKERS to pin
// the worker count for the parallel variant.
#include <benchmark/benchmark.h>

#include "chemostat/analysis.hpp"
#include "chemostat/parallel.hpp"

using namespace chemostat;

namespace {

MonteCarloSettings bench_settings(Execution exec, std::size_t replicas) {
  MonteCarloSettings s;
  s.burn_in = 10.0;
  s.horizon = 100.0;
  s.replicas = replicas;
  s.execution = exec;
  return s;
}

void BM_LambdaMC(benchmark::State& state, Execution exec) {
  const auto model = presets::example1();
  const auto settings = bench_settings(exec, static_cast<std::size_t>(state.range(0)));
  const StreamFamily streams{1, 0};
  for (auto _ : state) {
    const auto est = estimate_lambda_mc(model, settings, streams);
    benchmark::DoNotOptimize(est.value);
  }
  const double steps = static_cast<double>(settings.replicas) * (settings.burn_in + settings.horizon) / settings.integrator.dt;
  state.counters["steps/s"] = benchmark::Counter(steps, benchmark::Counter::kIsIterationInvariantRate);
  state.counters["workers"] = exec == Execution::Parallel ? static_cast<double>(worker_count()) : 1.0;
}

void BM_Ensemble(benchmark::State& state, Execution exec) {
  const auto model = presets::example3();
  IntegratorConfig config;
  config.dt = kTrajectoryDt;
  config.record_stride = 100;
  const auto replicas = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto runs = simulate_ensemble(model, {0.0, 12.0, 1.0, 0}, 500.0, config, replicas, {2, 0}, exec);
    benchmark::DoNotOptimize(runs.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_LambdaMC, serial, Execution::Serial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LambdaMC, parallel, Execution::Parallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Ensemble, serial, Execution::Serial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Ensemble, parallel, Execution::Parallel)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "hmink/hmcf.hpp"
#include "hmink/inequalities.hpp"
#include "hmink/profiles.hpp"
#include "hmink/q_iteration.hpp"

namespace {

const hmink::SpaceForm kH3{-1.0};

void BM_Eta(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmink::eta(x, kH3));
    x = x < 100.0 ? x * 1.01 : 0.5;
  }
}
BENCHMARK(BM_Eta);

void BM_EvaluateBounds(benchmark::State& state) {
  for (auto _ : state) { benchmark::DoNotOptimize(hmink::evaluate_bounds(30.0, 5.0, kH3)); }
}
BENCHMARK(BM_EvaluateBounds);

void BM_QIteration(benchmark::State& state) {
  hmink::IterationConfig cfg;
  cfg.n_points = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) { benchmark::DoNotOptimize(hmink::run_iteration(cfg)); }
}
BENCHMARK(BM_QIteration)->Arg(501)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_Measure(benchmark::State& state) {
  const auto s = hmink::make_perturbed_sphere(1.0, 0.05, 2, kH3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) { benchmark::DoNotOptimize(hmink::measure(s)); }
}
BENCHMARK(BM_Measure)->Arg(256)->Arg(1024);

void BM_FlowStep(benchmark::State& state) {
  const auto s = hmink::make_perturbed_sphere(1.0, 0.05, 2, kH3, static_cast<std::size_t>(state.range(0)));
  const double dt = 0.5 * hmink::stable_time_step(s);
  for (auto _ : state) { benchmark::DoNotOptimize(hmink::hmcf_step(s, dt)); }
}
BENCHMARK(BM_FlowStep)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "kaon/kaon.hpp"

using namespace kaon;

static void BM_EntropySurface(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(entropy_surface({}, {}, n, 1));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_EntropySurface)->Arg(81)->Arg(401);

static void BM_QmEvents(benchmark::State& state) {
  const auto& c = default_constants();
  const auto d = detection_with_budget(0.3, 0.3, {10, 21}, c);
  const EventSource src = qm_source(-1.0);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_run(src, d, c, {n, 7, 1}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_QmEvents)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_EvadingEvents(benchmark::State& state) {
  const auto& c = default_constants();
  const auto d = detection_with_budget(1e-3, 1e-3, {10, 21}, c);
  const EventSource src = LhvSource{construct_evading_lhv(d, c)};
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_run(src, d, c, {n, 7, 1}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EvadingEvents)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_ConstructEvading(benchmark::State& state) {
  const auto& c = default_constants();
  const auto d = detection_with_budget(1e-3, 1e-3, {10, 21}, c);
  for (auto _ : state) benchmark::DoNotOptimize(construct_evading_lhv(d, c));
}
BENCHMARK(BM_ConstructEvading);

static void BM_ContaminationHistogram(benchmark::State& state) {
  const auto& c = default_constants();
  for (auto _ : state) benchmark::DoNotOptimize(contamination_histogram(10, 30, 0.1, c));
}
BENCHMARK(BM_ContaminationHistogram);
BENCHMARK_MAIN();

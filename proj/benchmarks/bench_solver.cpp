#include <benchmark/benchmark.h>

#include "rlg/solver.hpp"
#include "rlg/strategies.hpp"

using namespace rlg;

static void BM_SolveH(benchmark::State& state) {
  const auto g = graph_h();
  for (auto _ : state) benchmark::DoNotOptimize(solve(g).capture_bound);
}
BENCHMARK(BM_SolveH);

static void BM_SolveKn(benchmark::State& state) {
  const auto g = build_named("K:" + std::to_string(state.range(0)) + "/" + std::to_string(state.range(1))).graph;
  SolveOptions o;
  o.threads = static_cast<unsigned>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(solve(g, o).verdict);
}
BENCHMARK(BM_SolveKn)->Args({5, 3, 1})->Args({5, 3, 2})->Args({6, 3, 1})->Unit(benchmark::kMillisecond);

static void BM_ProbePartition(benchmark::State& state) {
  const auto g = build_named("K:8/4").graph;
  const auto all = g.all_vertices();
  Vertex v = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(probe_partition(g, all, v).classes.size());
    v = (v + 1) % g.vertex_count();
  }
}
BENCHMARK(BM_ProbePartition);

static void BM_VerifyKnStrategy(benchmark::State& state) {
  const auto b = build_named("K:" + std::to_string(state.range(0)) + "/" + std::to_string(state.range(1)));
  for (auto _ : state) {
    const auto s = make_strategy("kn", b);
    benchmark::DoNotOptimize(verify_cop_strategy(b.graph, *s, 10'000).wins);
  }
}
BENCHMARK(BM_VerifyKnStrategy)->Args({6, 4})->Args({8, 5})->Unit(benchmark::kMillisecond);

static void BM_VerifyEvasionFamily(benchmark::State& state) {
  const auto b = build_named("Heawood");
  const auto f = make_robber_plan("girth6", b).family;
  for (auto _ : state) benchmark::DoNotOptimize(verify_evasion_family(b.graph, f));
}
BENCHMARK(BM_VerifyEvasionFamily);

BENCHMARK_MAIN();

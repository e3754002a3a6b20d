#include <benchmark/benchmark.h>

#include <random>

#include "bratteli/bratteli.hpp"

using namespace bratteli;

static void BM_SuccessorWalk(benchmark::State& state) {
  PathSpace space(odometer(static_cast<std::size_t>(state.range(0)), 10));
  FinitePath start = space.min_path_to(10, 0);
  for (auto _ : state) {
    FinitePath p = start;
    for (int i = 0; i < 1000; ++i) p = space.successor(p);
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SuccessorWalk)->Arg(2)->Arg(5);

static void BM_RankUnrank(benchmark::State& state) {
  PathSpace space(disjoint_union({odometer(2, 12), odometer(3, 12), odometer(5, 12)}));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> pick(0, space.path_count(12, 2) - 1);
  for (auto _ : state) {
    FinitePath p = space.unrank(12, 2, pick(rng));
    benchmark::DoNotOptimize(space.rank(p));
  }
}
BENCHMARK(BM_RankUnrank);

static void BM_Telescope(benchmark::State& state) {
  OrderedBratteliDiagram d = stationary_adic(CountMatrix::from_rows({{2, 1}, {1, 2}}), OrderRule::by_source, 12);
  for (auto _ : state) benchmark::DoNotOptimize(telescope(d, {3, 6, 9, 12}));
}
BENCHMARK(BM_Telescope);

static void BM_SmithNormalForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> entry(-9, 9);
  BigMatrix a(n, n, BigInt(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = entry(rng);
  for (auto _ : state) benchmark::DoNotOptimize(smith_normal_form(a));
}
BENCHMARK(BM_SmithNormalForm)->Arg(8)->Arg(16)->Arg(32);

static void BM_CycleOracle(benchmark::State& state) {
  CycleSystem cs = finite_cycle_system({7, 11, 13, 17, 16}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(k_oracle_finite_system(cs.system));
}
BENCHMARK(BM_CycleOracle);

static void BM_OrbitMapPipeline(benchmark::State& state) {
  const std::size_t levels = 8;
  std::vector<std::size_t> cuts;
  for (std::size_t k = 0; k < levels; ++k) cuts.push_back(2 * k + 1);
  OrderedBratteliDiagram b1 = telescope(odometer(2, 2 * levels - 1), cuts).diagram, b2 = odometer(4, levels);
  Intertwining w = constant_intertwining(CountMatrix(1, 1, 2), CountMatrix(1, 1, 2), levels);
  for (auto _ : state) {
    InterleavedDiagram b = build_interleaved(b1, b2, w);
    OrbitMapRealization f = realize_orbit_map(b, pair_extremal_paths(b, 3));
    benchmark::DoNotOptimize(check_cocycle_continuity(f, 5));
  }
}
BENCHMARK(BM_OrbitMapPipeline)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Microbenchmarks for the hot paths: seed materialization, the sort-based
// collision finder, recipe application, capacity arithmetic, and an
// end-to-end solve at a small parameter point.

#include <benchmark/benchmark.h>

#include <vector>

#include "multisis/estimator.hpp"
#include "multisis/merge.hpp"
#include "multisis/oracle.hpp"
#include "multisis/rng.hpp"
#include "multisis/seeds.hpp"

using namespace multisis;

namespace {

std::vector<TrackedRow> random_rows(std::size_t count, std::size_t width,
                                    u64 q, u64 seed) {
  Rng rng(seed);
  std::vector<TrackedRow> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    TrackedRow r;
    r.residual.resize(width);
    for (auto& v : r.residual) v = rng.below(q);
    r.combo = CombinationVector::unit(std::uint32_t(i), +1);
    rows.push_back(std::move(r));
  }
  return rows;
}

void BM_FindCollisions(benchmark::State& state) {
  const auto rows =
      random_rows(std::size_t(state.range(0)), 2, 97, 12345);
  for (auto _ : state) {
    CollisionResult res = find_collisions(rows, 2, 97);
    benchmark::DoNotOptimize(res.recipes.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ApplyRecipes(benchmark::State& state) {
  const SisInstance inst = gen_instance(2, 60, 97, 7);
  const auto seeds = collect_seeds(60, 2, std::size_t(state.range(0)),
                                   SeedOrder::random, 3);
  const Level0 level0 = materialize_level0(seeds, inst);
  const CollisionResult col = find_collisions(level0.rows, 1, 97);
  for (auto _ : state) {
    state.PauseTiming();
    ComboSet fresh;
    state.ResumeTiming();
    ApplyOutcome out = apply_recipes(level0.rows, col.recipes, 1, 97, 16,
                                     fresh);
    benchmark::DoNotOptimize(out.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * i64(col.recipes.size()));
}

void BM_MaterializeSeeds(benchmark::State& state) {
  const SisInstance inst = gen_instance(3, 80, 97, 11);
  const auto seeds = collect_seeds(80, 3, std::size_t(state.range(0)),
                                   SeedOrder::random, 17);
  for (auto _ : state) {
    Level0 l0 = materialize_level0(seeds, inst);
    benchmark::DoNotOptimize(l0.rows.data());
  }
  state.SetItemsProcessed(state.iterations() * i64(seeds.size()));
}

void BM_Capacity(benchmark::State& state) {
  for (auto _ : state) {
    BigInt c = capacity(int(state.range(0)), int(state.range(1)));
    benchmark::DoNotOptimize(&c);
  }
}

void BM_SolveEndToEnd(benchmark::State& state) {
  const SisInstance inst = gen_instance(2, 100, u64(state.range(0)), 21);
  const Plan plan =
      plan_parameters(2, 100, u64(state.range(0)), 6.0, 5, u64(1) << 17);
  for (auto _ : state) {
    SolveOptions opts;
    opts.target_count = 5;
    opts.rng_seed = 42;
    SolveOutcome out = solve(inst, plan, opts);
    benchmark::DoNotOptimize(out.solutions.size());
  }
}

void BM_OracleScan(benchmark::State& state) {
  const SisInstance inst = gen_instance(2, 12, 5, 31);
  for (auto _ : state) {
    OracleResult r = brute_force_pm1(inst, int(state.range(0)));
    benchmark::DoNotOptimize(r.report.exact_count);
  }
}

}  // namespace

BENCHMARK(BM_FindCollisions)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_ApplyRecipes)->Arg(2000)->Arg(20000);
BENCHMARK(BM_MaterializeSeeds)->Arg(10000)->Arg(100000);
BENCHMARK(BM_Capacity)->Args({50, 9})->Args({200, 16})->Args({1000, 32});
BENCHMARK(BM_SolveEndToEnd)->Arg(97)->Arg(307);
BENCHMARK(BM_OracleScan)->Arg(3)->Arg(5);

BENCHMARK_MAIN();

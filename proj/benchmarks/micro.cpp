// Wall-clock throughput of the simulator hot paths. Transfer counts, not
// time, are the product of this project; these exist to keep the simulator
// fast enough that paper-scale runs stay in the minutes range.

#include <benchmark/benchmark.h>

#include "wem/graphs.hpp"
#include "wem/khash.hpp"
#include "wem/memsim.hpp"
#include "wem/rng.hpp"

namespace {

void BM_AccessHit(benchmark::State& state) {
  wem::MemSim sim({64, 1000, wem::Policy::Classic, 0.5});
  wem::TypedArray<uint64_t> a(sim, 64);
  a.set(0, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(a.get(0));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AccessHit);

void BM_AccessStream(benchmark::State& state) {
  wem::MemSim sim({64, 1000, wem::Policy::Classic, 0.5});
  wem::TypedArray<uint64_t> a(sim, 1 << 20);
  uint64_t i = 0;
  for (auto _ : state) {
    a.set(i, i);
    i = (i + 1) & ((1 << 20) - 1);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AccessStream);

void BM_HashInsert(benchmark::State& state) {
  wem::MemSim sim({64, 10000, wem::Policy::Classic, 0.5});
  wem::HashParams hp;
  hp.k = static_cast<uint32_t>(state.range(0));
  wem::KLevelHashTable t(sim, hp);
  wem::KeyPermutation keys(7);
  uint32_t i = 0;
  for (auto _ : state) {
    t.insert(keys.key_at(i++));
    if (i == (1u << 20)) {
      state.PauseTiming();
      t.clear();
      i = 0;
      state.ResumeTiming();
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HashInsert)->Arg(1)->Arg(2)->Arg(4);

void BM_GridBfs(benchmark::State& state) {
  wem::MemSim sim({64, 2000, wem::Policy::Classic, 0.5});
  wem::Graph g = wem::gen_grid2d(sim, 200, 200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wem::bfs_classic(sim, g, 0));
    sim.reset();
  }
}
BENCHMARK(BM_GridBfs);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <array>
#include <map>
#include <utility>

#include "socnet/graph.hpp"
#include "socnet/nullmodels.hpp"
#include "socnet/stratify.hpp"
#include "socnet/synthgen.hpp"

using namespace socnet;

namespace {

const SyntheticSociety& society(std::size_t nodes, std::size_t edges) {
  static std::map<std::pair<std::size_t, std::size_t>, SyntheticSociety> cache;
  auto it = cache.find({nodes, edges});
  if (it == cache.end()) {
    SynthConfig cfg;
    cfg.n_nodes = nodes;
    cfg.n_edges = edges;
    cfg.seed = 7;
    it = cache.emplace(std::make_pair(nodes, edges), generate_society(cfg)).first;
  }
  return it->second;
}

void shuffle_bench(benchmark::State& state, NullModel model) {
  const auto& s = society(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  ShuffleConfig cfg;
  cfg.model = model;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = ++seed;
    auto r = shuffle(s.graph, cfg);
    benchmark::DoNotOptimize(r.performed_swaps);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(5 * s.graph.edge_count()));
}

void BM_Nm1Shuffle(benchmark::State& state) { shuffle_bench(state, NullModel::nm1); }
void BM_Nm2Shuffle(benchmark::State& state) { shuffle_bench(state, NullModel::nm2); }

void BM_ClassLinks(benchmark::State& state) {
  const auto& s = society(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(class_link_matrix(s.graph, s.classes));
}

void BM_ResidualDensity(benchmark::State& state) {
  const auto& s = society(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto schedule = make_removal_schedule(s.wealth);
  for (auto _ : state) benchmark::DoNotOptimize(residual_density(s.graph, schedule));
}

void BM_Ensemble(benchmark::State& state) {
  const auto& s = society(10000, 50000);
  ShuffleConfig cfg;
  cfg.seed = 3;
  EnsembleOptions opts;
  opts.realizations = static_cast<std::size_t>(state.range(0));
  const std::array<GraphStatistic, 1> stats{class_link_statistic(s.classes)};
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(s.graph, cfg, opts, stats));
}

}  // namespace

BENCHMARK(BM_Nm1Shuffle)->Args({10000, 50000})->Args({100000, 500000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Nm2Shuffle)->Args({10000, 50000})->Args({100000, 500000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassLinks)->Args({10000, 50000})->Args({100000, 500000})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ResidualDensity)->Args({10000, 50000})->Args({100000, 500000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

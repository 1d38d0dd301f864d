#include "fastinf/centrality.hpp"
#include "fastinf/epidemic.hpp"
#include "fastinf/evaluation.hpp"
#include "fastinf/generators.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace fastinf;

namespace {

const Graph& network(std::size_t n) {
  static std::map<std::size_t, Graph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, barabasi_albert(n, 4, 7)).first;
  return it->second;
}

void BM_Betweenness(benchmark::State& state) {
  const auto& g = network(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(betweenness(g, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Betweenness)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Closeness(benchmark::State& state) {
  const auto& g = network(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(closeness(g, 1));
}
BENCHMARK(BM_Closeness)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_LocalRank(benchmark::State& state) {
  const auto& g = network(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(local_rank(g, 1));
}
BENCHMARK(BM_LocalRank)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_KCore(benchmark::State& state) {
  const auto& g = network(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(k_core(g));
}
BENCHMARK(BM_KCore)->Arg(10000)->Arg(100000);

void BM_Eigenvector(benchmark::State& state) {
  const auto& g = network(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvector(g));
}
BENCHMARK(BM_Eigenvector)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Dsc(benchmark::State& state) {
  const auto& g = network(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dynamics_sensitive(g, {0.05, 1.0, 5}));
}
BENCHMARK(BM_Dsc)->Arg(100000)->Unit(benchmark::kMillisecond);

// One SIR realization per iteration, seeds cycling over all nodes.
void BM_SirRun(benchmark::State& state) {
  const auto& g = network(10000);
  SimulationConfig c;
  c.beta = state.range(0) / 1000.0;
  SirWorkspace ws(g.node_count());
  std::uint64_t run = 0;
  for (auto _ : state) {
    const auto seed = static_cast<NodeId>(run % g.node_count());
    auto rng = derive_stream(1, seed, run++);
    benchmark::DoNotOptimize(simulate_run(g, seed, c, rng, ws, 30));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_SirRun)->Arg(20)->Arg(50)->Arg(200);

void BM_InfluenceCurves(benchmark::State& state) {
  const auto& g = network(2000);
  SimulationConfig c;
  c.beta = 0.05;
  c.runs = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(influence_curves(g, c, {}, 1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0) * 2000);
}
BENCHMARK(BM_InfluenceCurves)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Pearson(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = u(rng), y[i] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(pearson(x, y));
}
BENCHMARK(BM_Pearson)->Arg(100000);

void BM_Precision(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u;
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = u(rng), y[i] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(precision_at(x, y, 0.005));
}
BENCHMARK(BM_Precision)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();

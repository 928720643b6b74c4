#include <benchmark/benchmark.h>

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "shapval/harness.hpp"
#include "shapval/metrics.hpp"
#include "shapval/rng.hpp"
#include "shapval/shapley.hpp"

using namespace shapval;

namespace {

SynthData bench_data(int n_positive, int n_negative, int dim) {
  SynthConfig config;
  config.n_positive = n_positive;
  config.n_negative = n_negative;
  config.dim = dim;
  config.seed = 1;
  return synth_gaussian(config);
}

std::vector<std::vector<int>> random_coalitions(const Dataset& train,
                                                std::size_t count) {
  rng::Stream stream(99);
  std::vector<std::vector<int>> result(count);
  for (std::vector<int>& coalition : result) {
    for (const int id : train.ids()) {
      if (stream.next_unit() < 0.5) coalition.push_back(id);
    }
  }
  return result;
}

// Train-and-score cost of a never-seen coalition: the dominant cost of
// every sampling run.
void BM_utility_uncached(benchmark::State& state) {
  const SynthData data = bench_data(20, 80, 16);
  const auto coalitions = random_coalitions(data.train, 1 << 14);
  std::optional<UtilityEvaluator> evaluator;
  evaluator.emplace(data.train, data.test);
  std::size_t next = 0;
  for (auto _ : state) {
    if (next == coalitions.size()) {
      state.PauseTiming();
      evaluator.emplace(data.train, data.test);  // start over with a cold cache
      next = 0;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(evaluator->coalition_confusion(coalitions[next++]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_utility_uncached)->Unit(benchmark::kMicrosecond);

// The same lookup once the coalition is cached: what the second and third
// metric of a multi-metric run pay.
void BM_utility_cached(benchmark::State& state) {
  const SynthData data = bench_data(20, 80, 16);
  const UtilityEvaluator evaluator(data.train, data.test);
  const std::vector<int> coalition = random_coalitions(data.train, 1).front();
  benchmark::DoNotOptimize(evaluator.coalition_confusion(coalition));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluator.coalition_confusion(coalition));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_utility_cached)->Unit(benchmark::kMicrosecond);

// End-to-end sampling: ten permutations of a twenty-point set, cold caches,
// reported per run.
void BM_mc_sampling(benchmark::State& state) {
  const SynthData data = bench_data(4, 16, 8);
  SamplerConfig sampler;
  sampler.max_permutations = 10;
  sampler.stop_on_convergence = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    sampler.seed = seed++;
    benchmark::DoNotOptimize(mc_shapley(data.train, data.test,
                                        MetricKind::accuracy, TrainConfig{},
                                        sampler));
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_mc_sampling)->Unit(benchmark::kMillisecond);

// Enumeration overhead of the exact engine on a trivial game: isolates the
// subset bookkeeping from model fitting.
void BM_exact_game(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto game = [](std::uint32_t mask) {
    return static_cast<double>(std::popcount(mask)) / 32.0;
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_shapley_game(n, game, kMaxExactCap));
  }
}
BENCHMARK(BM_exact_game)->Arg(8)->Arg(12)->Arg(16)->Arg(20)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "shapval/harness.hpp"
#include "shapval/model.hpp"

using namespace shapval;

namespace {

Dataset bench_train(int n, int dim) {
  SynthConfig config;
  config.n_positive = std::max(1, n / 5);
  config.n_negative = n - config.n_positive;
  config.dim = dim;
  config.seed = 1;
  return synth_gaussian(config).train;
}

// Cost of one from-scratch fit at the training-set sizes the sampling engine
// sees along a permutation.
void BM_fit(benchmark::State& state) {
  const Dataset train = bench_train(static_cast<int>(state.range(0)), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(train));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_fit)->Arg(10)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

// One loss-and-gradient epoch, the inner loop of every fit.
void BM_loss_grad(benchmark::State& state) {
  const Dataset train = bench_train(100, 16);
  const detail::FlatData data = detail::FlatData::from_dataset(train);
  const std::vector<double> weights(16, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_logistic_loss(data, weights, 0.0, 4.0, 1e-4));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_loss_grad)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

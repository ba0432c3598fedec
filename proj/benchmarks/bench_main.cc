#include <benchmark/benchmark.h>

#include <numeric>

#include "rfscreen/eval.h"
#include "rfscreen/forest.h"
#include "rfscreen/rfms.h"
#include "rfscreen/synth.h"

namespace {

rfscreen::Dataset noise(std::size_t n, std::size_t p, int k) {
  rfscreen::Rng rng(1);
  std::vector<double> values(n * p);
  for (auto& v : values) v = rng.normal();
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(k)) + 1;
  std::vector<std::string> names;
  for (std::size_t f = 0; f < p; ++f) names.push_back("x" + std::to_string(f));
  return rfscreen::Dataset(n, std::move(values), std::move(labels), std::move(names), k);
}

void BM_BestSplit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const rfscreen::Dataset d = noise(n, 20, 4);
  std::vector<std::size_t> rows(n), features(20);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(features.begin(), features.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(rfscreen::best_split(d, rows, features, 1, 0.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BestSplit)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_TrainForest(benchmark::State& state) {
  const rfscreen::Dataset d = noise(320, 120, 20);
  const rfscreen::ForestParams params{.n_trees = 100, .n_subfeatures = 10,
                                      .n_threads = static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(rfscreen::train_forest(d, params));
}
BENCHMARK(BM_TrainForest)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Screen(benchmark::State& state) {
  const rfscreen::GeneratedData g = rfscreen::generate(rfscreen::GeneratorConfig{});
  rfscreen::ScreeningConfig config;
  config.n_canaries = 100;
  config.forest = {.n_trees = 100, .n_subfeatures = 10, .n_threads = 1};
  for (auto _ : state) benchmark::DoNotOptimize(rfscreen::screen(g.dataset, config));
}
BENCHMARK(BM_Screen)->Unit(benchmark::kMillisecond);

void BM_Knn(benchmark::State& state) {
  const rfscreen::Dataset d = noise(static_cast<std::size_t>(state.range(0)), 20, 5);
  const std::vector<double> query(20, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(rfscreen::knn_predict(d, query, 5));
}
BENCHMARK(BM_Knn)->Range(256, 8192);

}  // namespace

BENCHMARK_MAIN();

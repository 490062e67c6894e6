// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>

#include "ntmal/serial.hpp"
#include "ntmal/synthetic_corpus.hpp"

using namespace ntmal;

namespace {

const GeneratedCorpus& corpus(std::size_t n) {
  static std::map<std::size_t, GeneratedCorpus> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    GeneratorConfig g;
    g.n_traces = n;
    g.min_length = 200;
    g.max_length = 600;
    it = cache.emplace(n, generate(g)).first;
  }
  return it->second;
}

void BM_FitTransformSerial(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::fit_transform(c.traces, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FitTransformParallel(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_transform(c.traces, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct Scored {
  FittedFeatures features;
  LinearModel model;
};

const Scored& scored(std::size_t n) {
  static std::map<std::size_t, Scored> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto f = fit_transform(corpus(n).traces, {});
    SgdConfig c;
    c.epochs = 3;
    auto m = train_sgd(f.matrix, f.matrix.signs(), c);
    it = cache.emplace(n, Scored{std::move(f), std::move(m)}).first;
  }
  return it->second;
}

void BM_TransformSerial(benchmark::State& state) {
  const auto& s = scored(static_cast<std::size_t>(state.range(0)));
  const auto& traces = corpus(static_cast<std::size_t>(state.range(0))).traces;
  for (auto _ : state) benchmark::DoNotOptimize(serial::transform(s.features.vectorizer, traces));
}

void BM_TransformParallel(benchmark::State& state) {
  const auto& s = scored(static_cast<std::size_t>(state.range(0)));
  const auto& traces = corpus(static_cast<std::size_t>(state.range(0))).traces;
  for (auto _ : state) benchmark::DoNotOptimize(s.features.vectorizer.transform(traces));
}

void BM_DecisionScoresSerial(benchmark::State& state) {
  const auto& s = scored(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::decision_scores(s.model, s.features.matrix));
}

void BM_DecisionScoresParallel(benchmark::State& state) {
  const auto& s = scored(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decision_scores(s.model, s.features.matrix));
}

GridSpec small_grid(TrainerKind kind) {
  GridSpec spec;
  spec.trainer = kind;
  spec.alpha_grid = {1.0, 0.01, 1e-4, 1e-6};
  spec.tol_grid = {0.1, 1e-3};
  return spec;
}

void BM_GridSearchSerial(benchmark::State& state) {
  const auto& s = scored(static_cast<std::size_t>(state.range(0)));
  const auto spec = small_grid(state.range(1) ? TrainerKind::DualCd : TrainerKind::Sgd);
  for (auto _ : state) benchmark::DoNotOptimize(serial::grid_search(s.features.matrix, s.features.matrix, spec));
}

void BM_GridSearchParallel(benchmark::State& state) {
  const auto& s = scored(static_cast<std::size_t>(state.range(0)));
  const auto spec = small_grid(state.range(1) ? TrainerKind::DualCd : TrainerKind::Sgd);
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(s.features.matrix, s.features.matrix, spec));
}

}  // namespace

BENCHMARK(BM_FitTransformSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitTransformParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransformSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransformParallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecisionScoresSerial)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DecisionScoresParallel)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GridSearchSerial)->Args({500, 0})->Args({500, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSearchParallel)->Args({500, 0})->Args({500, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

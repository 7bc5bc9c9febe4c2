#include <benchmark/benchmark.h>

#include "hera/data.hpp"
#include "hera/loss.hpp"
#include "hera/predict.hpp"
#include "hera/prox.hpp"
#include "hera/solver.hpp"
#include "hera/synthetic.hpp"

namespace {

using namespace hera;

PartialLabelDataset corrupted_blobs(Index n, Index d, Index q) {
  CorruptionSpec spec;
  spec.p = 0.5;
  spec.r = 1;
  spec.seed = 1;
  return corrupt(make_blobs(n, d, q, 4.0, 1), spec);
}

void BM_RankingLoss(benchmark::State& state) {
  const auto n = Index(state.range(0));
  const PartialLabelDataset ds = corrupted_blobs(n, 10, 5);
  const Matrix W = Matrix::Random(10, 5);
  const ConfidenceState cs = init_state(ds).second;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ranking_loss(ds, W, cs.confidence));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_RankingLoss)->Range(64, 1024)->Complexity(benchmark::oN);

void BM_GradW(benchmark::State& state) {
  const auto n = Index(state.range(0));
  const PartialLabelDataset ds = corrupted_blobs(n, 10, 5);
  const Matrix W = Matrix::Random(10, 5);
  const ConfidenceState cs = init_state(ds).second;
  const Hyperparams hp;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grad_w(ds, W, cs.confidence, hp));
  }
}
BENCHMARK(BM_GradW)->Range(64, 1024);

void BM_GradP(benchmark::State& state) {
  const auto n = Index(state.range(0));
  const PartialLabelDataset ds = corrupted_blobs(n, 10, 5);
  const Matrix W = Matrix::Random(10, 5);
  const ConfidenceState cs = init_state(ds).second;
  const Hyperparams hp;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grad_p(ds, W, cs, hp, 0.5, 0.5));
  }
}
BENCHMARK(BM_GradP)->Range(64, 1024);

void BM_Svt(benchmark::State& state) {
  const auto n = Index(state.range(0));
  const Matrix input = Matrix::Random(8, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svt(input, 0.3));
  }
}
BENCHMARK(BM_Svt)->Range(64, 2048);

void BM_Fit(benchmark::State& state) {
  const PartialLabelDataset ds = corrupted_blobs(Index(state.range(0)), 5, 3);
  Hyperparams hp;
  hp.iter_max = 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(ds, hp));
  }
}
BENCHMARK(BM_Fit)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_PredictBatch(benchmark::State& state) {
  const auto n = Index(state.range(0));
  const PartialLabelDataset ds = corrupted_blobs(n, 10, 5);
  const ConfidenceState cs = init_state(ds).second;
  ModelState model;
  model.weights = Matrix::Random(10, 5);
  const Matrix queries = Matrix::Random(10, 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_batch(queries, ds, model, cs.confidence, 10));
  }
}
BENCHMARK(BM_PredictBatch)->Range(128, 1024);

}  // namespace

BENCHMARK_MAIN();

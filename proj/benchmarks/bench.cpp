#include <benchmark/benchmark.h>

#include "mps/model.hpp"
#include "mps/sums.hpp"
#include "mps/weakconv.hpp"

namespace {

mps::SequenceModel ar1_model() {
  mps::SequenceModel model;
  model.kind = mps::ModelKind::GaussianAssoc;
  model.ar1 = mps::Ar1Covariance{0.5, 1.0};
  return model;
}

void BM_GenPathIid(benchmark::State& state) {
  const mps::SequenceModel model;
  const auto n = state.range(0);
  std::uint64_t replicate = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(mps::gen_path(model, 0, n, 1, replicate++));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GenPathIid)->Arg(1024)->Arg(4096);

void BM_GenPathAr1(benchmark::State& state) {
  const auto model = ar1_model();
  const auto n = state.range(0);
  std::uint64_t replicate = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(mps::gen_path(model, n, n, 1, replicate++));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GenPathAr1)->Arg(1024)->Arg(4096);

void BM_WindowVarianceAr1(benchmark::State& state) {
  const auto model = ar1_model();
  const mps::Window window{state.range(0), state.range(0)};
  for (auto _ : state) benchmark::DoNotOptimize(mps::window_variance(model, window));
}
BENCHMARK(BM_WindowVarianceAr1)->Arg(4096)->Arg(65536);

void BM_NormalizedSums(benchmark::State& state) {
  const mps::SequenceModel model;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        mps::mc_normalized_sums(model, {0, state.range(0)}, 200, 1, 1));
  state.SetItemsProcessed(state.iterations() * 200 * state.range(0));
}
BENCHMARK(BM_NormalizedSums)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();

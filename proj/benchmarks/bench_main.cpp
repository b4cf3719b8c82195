#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "deepcnl/baselines.hpp"
#include "deepcnl/model.hpp"
#include "deepcnl/rng.hpp"

namespace {

using namespace deepcnl;

std::vector<ObservationMatrix> random_observations(std::size_t pairs, std::size_t rows,
                                                   std::size_t days, Rng& rng) {
  std::vector<ObservationMatrix> out;
  for (std::size_t p = 0; p < pairs; ++p) {
    ObservationMatrix obs;
    obs.pair = {"A" + std::to_string(p), "B" + std::to_string(p)};
    obs.features_per_stock = rows / 2;
    obs.rows = NdArray({rows, days});
    for (std::size_t i = 0; i < obs.rows.size(); ++i) obs.rows[i] = rng.uniform();
    out.push_back(std::move(obs));
  }
  return out;
}

KernelBank random_bank(std::size_t K, std::size_t L, std::size_t rows, Rng& rng) {
  KernelBank bank;
  bank.K = K;
  bank.L = L;
  bank.rows = rows;
  bank.kernels = NdArray({K, L * rows});
  for (std::size_t i = 0; i < bank.kernels.size(); ++i) bank.kernels[i] = rng.uniform(-1, 1);
  bank.bias = rng.uniform(-1, 1);
  return bank;
}

void BM_ComputeEvidence(benchmark::State& state) {
  const auto pairs = static_cast<std::size_t>(state.range(0));
  const std::size_t K = 4, L = 5, rows = 4, days = 250;
  Rng rng(1);
  auto observations = random_observations(pairs, rows, days, rng);
  auto bank = random_bank(K, L, rows, rng);
  for (auto _ : state) {
    EvidenceTensor ev = compute_evidence(observations, bank);
    benchmark::DoNotOptimize(ev.values.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(pairs * K * (days - L + 1)));
}
BENCHMARK(BM_ComputeEvidence)->Arg(45)->Arg(190)->Arg(1081);

LstmLayerParams random_layer(std::size_t input_dim, std::size_t hidden, Rng& rng) {
  LstmLayerParams layer;
  layer.input_dim = input_dim;
  layer.hidden = hidden;
  for (NdArray* m : {&layer.w_ii, &layer.w_if, &layer.w_ig, &layer.w_io})
    *m = NdArray({hidden, input_dim});
  for (NdArray* m : {&layer.w_hi, &layer.w_hf, &layer.w_hg, &layer.w_ho})
    *m = NdArray({hidden, hidden});
  for (NdArray* b : {&layer.b_ii, &layer.b_if, &layer.b_ig, &layer.b_io, &layer.b_hi,
                     &layer.b_hf, &layer.b_hg, &layer.b_ho})
    *b = NdArray({hidden});
  for (NdArray* m : {&layer.w_ii, &layer.w_if, &layer.w_ig, &layer.w_io, &layer.w_hi,
                     &layer.w_hf, &layer.w_hg, &layer.w_ho, &layer.b_ii, &layer.b_if,
                     &layer.b_ig, &layer.b_io, &layer.b_hi, &layer.b_hf, &layer.b_hg,
                     &layer.b_ho})
    for (std::size_t i = 0; i < m->size(); ++i) (*m)[i] = rng.uniform(-0.2, 0.2);
  return layer;
}

void BM_LstmForward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const std::size_t pairs = 45, K = 4, steps = 246;
  Rng rng(2);

  EvidenceTensor ev;
  for (std::size_t p = 0; p < pairs; ++p)
    ev.pairs.push_back({"A" + std::to_string(p), "B" + std::to_string(p)});
  ev.K = K;
  ev.steps = steps;
  ev.values.resize(pairs * K * steps);
  for (double& v : ev.values) v = rng.uniform(-1, 1);

  std::vector<LstmLayerParams> lstm = {random_layer(pairs * K, hidden, rng)};
  Head head;
  head.projection = NdArray({K, hidden});
  head.alpha = NdArray({K});
  for (std::size_t i = 0; i < head.projection.size(); ++i)
    head.projection[i] = rng.uniform(-0.2, 0.2);
  for (std::size_t i = 0; i < K; ++i) head.alpha[i] = rng.uniform(-0.2, 0.2);

  for (auto _ : state) {
    std::vector<double> y = forward(ev, lstm, head);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_LstmForward)->Arg(32)->Arg(64)->Arg(256);

void BM_DtwDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform();
  }
  for (auto _ : state) {
    double d = dtw_distance(x, y);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_DtwDistance)->Arg(250)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();

// Microbenchmarks for the hot paths: ridge statistics maintenance and the
// layered arm selection, at the dimensions the simulations actually use.

#include <benchmark/benchmark.h>

#include "fedsuplinucb/client.hpp"
#include "fedsuplinucb/environment.hpp"
#include "fedsuplinucb/protocol.hpp"
#include "fedsuplinucb/rng.hpp"
#include "fedsuplinucb/schedule.hpp"

using namespace fedsup;

namespace {

std::vector<Vector> make_contexts(int d, int K, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int a = 0; a < K; ++a) out.push_back(sample_sphere(d, rng));
  return out;
}

void BM_RidgeUpdate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RidgeStats stats(d);
  RngStream rng(1);
  const Vector x = sample_sphere(d, rng);
  for (auto _ : state) {
    stats.update(x, 0.5);
    benchmark::DoNotOptimize(stats.gram_inv().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RidgeUpdate)->Arg(10)->Arg(25);

void BM_RidgeMerge(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(2);
  DeltaStats delta(d);
  for (int n = 0; n < 32; ++n) {
    delta.accumulate(sample_sphere(d, rng), 2.0 * rng.uniform() - 1.0);
  }
  for (auto _ : state) {
    state.PauseTiming();
    RidgeStats stats(d);
    state.ResumeTiming();
    stats.merge(delta);
    benchmark::DoNotOptimize(stats.log_det());
  }
}
BENCHMARK(BM_RidgeMerge)->Arg(10)->Arg(25);

void BM_WeightedNorm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RidgeStats stats(d);
  RngStream rng(3);
  for (int n = 0; n < 200; ++n) {
    stats.update(sample_sphere(d, rng), rng.uniform());
  }
  const Vector x = sample_sphere(d, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats.weighted_norm(x));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WeightedNorm)->Arg(10)->Arg(25);

// Full per-round selection at the synthetic-experiment dimensions
// (d=25, K=20) and at the small desk dimensions (d=10, K=10).
void BM_SlucbSelect(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  AlgoConfig cfg;
  cfg.d = d;
  cfg.K = K;
  cfg.M = 20;
  cfg.T = 40000;
  const LayerSchedule schedule = build_schedule(cfg);
  ClientState client(0, d, schedule.num_layers());
  RngStream rng(4);
  for (int n = 0; n < 500; ++n) {
    const Vector x = sample_sphere(d, rng);
    slucb_update(client, static_cast<int>(rng.below(
                             static_cast<std::uint64_t>(schedule.num_layers()))),
                 x, rng.uniform());
  }
  const auto contexts = make_contexts(d, K, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        slucb_select(client, schedule, contexts, UpdateMode::lazy));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SlucbSelect)->Args({10, 10})->Args({25, 20});

void BM_SyncLayer(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  ServerState server(d, 1);
  std::vector<ClientState> clients;
  for (int j = 0; j < 5; ++j) clients.emplace_back(j, d, 1);
  RngStream rng(6);
  CommLog log;
  long round = 0;
  for (auto _ : state) {
    state.PauseTiming();
    for (auto& c : clients) {
      for (int n = 0; n < 8; ++n) {
        slucb_update(c, 0, sample_sphere(d, rng), rng.uniform());
      }
    }
    std::vector<ClientState*> parts;
    for (auto& c : clients) parts.push_back(&c);
    log.events.clear();
    state.ResumeTiming();
    sync_layer(server, parts, 0, ++round, log, nullptr);
  }
}
BENCHMARK(BM_SyncLayer)->Arg(10)->Arg(25);

}  // namespace

BENCHMARK_MAIN();

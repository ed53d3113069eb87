#include <benchmark/benchmark.h>

#include <random>

#include "sigdrift/datagen.hpp"
#include "sigdrift/detect.hpp"
#include "sigdrift/similarity.hpp"

namespace {

using namespace sigdrift;

const std::vector<Signature>& bases() {
  static const auto sigs = default_provider_signatures(42);
  return sigs;
}

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

void BM_Pcc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(n, 1);
  const auto b = noise(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pcc(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pcc)->Arg(360)->Arg(4096);

void BM_WindowScan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noise(n, 3);
  const auto b = noise(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(scan_window_deletions(a, b, 6));
}
BENCHMARK(BM_WindowScan)->Arg(360)->Arg(3600);

void BM_SlidingWindowDetect(benchmark::State& state) {
  const auto pair = make_noisy(bases()[0], Spike{100, 3, 5.0}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sliding_window_detect(pair.existing, pair.recomputed));
}
BENCHMARK(BM_SlidingWindowDetect);

void BM_CusumDetect(benchmark::State& state) {
  const auto pair = make_noisy(bases()[1], Distortion{20.0}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(cusum_detect(pair.existing, pair.recomputed));
}
BENCHMARK(BM_CusumDetect);

void BM_BuildCorpus(benchmark::State& state) {
  CorpusConfig cfg;
  cfg.n_changed = static_cast<std::size_t>(state.range(0)) / 2;
  cfg.n_noisy = cfg.n_changed;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_corpus(bases(), cfg, ++seed, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildCorpus)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_ProviderSignatures(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(default_provider_signatures(7));
}
BENCHMARK(BM_ProviderSignatures)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

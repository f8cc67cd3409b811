#include <benchmark/benchmark.h>

#include "spoofguard/data.hpp"
#include "spoofguard/metrics.hpp"
#include "spoofguard/rng.hpp"

using namespace spoofguard;

namespace {

ScoreSet random_scores(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  ScoreSet s;
  for (std::size_t i = 0; i < per_class; ++i) {
    s.bonafide.push_back(rng.gaussian() + 1.0);
    s.spoof.push_back(rng.gaussian() - 1.0);
  }
  return s;
}

}  // namespace

static void BM_ComputeEer(benchmark::State& state) {
  const ScoreSet s = random_scores(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_eer(s));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_ComputeEer)->Arg(1000)->Arg(100000);

static void BM_MinTdcf(benchmark::State& state) {
  const ScoreSet s = random_scores(static_cast<std::size_t>(state.range(0)), 8);
  const TdcfCosts costs = tdcf_constants(TdcfParameters{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_tdcf_normalized(s, costs));
  }
}
BENCHMARK(BM_MinTdcf)->Arg(1000)->Arg(100000);

static void BM_SynthUtterance(benchmark::State& state) {
  SynthConfig cfg;
  cfg.seed = 9;
  const TrialKey key = state.range(0) == 0 ? TrialKey::bonafide : TrialKey::spoof;
  int index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth_utterance(cfg, index++ % 16, key));
  }
  state.SetLabel(state.range(0) == 0 ? "bonafide" : "spoof");
}
BENCHMARK(BM_SynthUtterance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

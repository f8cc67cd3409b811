#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "spoofguard/features.hpp"
#include "spoofguard/fft.hpp"
#include "spoofguard/rng.hpp"

using namespace spoofguard;

namespace {

AudioBuffer test_utterance(double seconds) {
  AudioBuffer buf;
  buf.sample_rate_hz = 16000;
  buf.source_id = "bench";
  Rng rng(1);
  const std::size_t n = static_cast<std::size_t>(seconds * buf.sample_rate_hz);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / buf.sample_rate_hz;
    const double v = 0.4 * std::sin(2.0 * std::numbers::pi * 220.0 * t) +
                     0.1 * rng.uniform(-1.0, 1.0);
    buf.samples.push_back(static_cast<float>(v));
  }
  return buf;
}

}  // namespace

static void BM_FftPower2048(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> frame(2048);
  for (auto& v : frame) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fft_power(frame));
  }
}
BENCHMARK(BM_FftPower2048);

static void BM_MelFilterbank(benchmark::State& state) {
  FrontEndConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mel_filterbank(cfg, 16000));
  }
}
BENCHMARK(BM_MelFilterbank);

static void BM_ExtractMelSpectrogram(benchmark::State& state) {
  const AudioBuffer buf = test_utterance(3.0);
  FrontEndConfig cfg;
  cfg.out_height = static_cast<int>(state.range(0));
  cfg.out_width = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_mel_spectrogram(buf, cfg));
  }
  state.SetLabel(std::to_string(state.range(0)) + "x" + std::to_string(state.range(0)));
}
BENCHMARK(BM_ExtractMelSpectrogram)->Arg(64)->Arg(224)->Unit(benchmark::kMillisecond);

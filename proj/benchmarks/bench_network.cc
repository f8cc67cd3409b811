#include <benchmark/benchmark.h>

#include "spoofguard/layers.hpp"
#include "spoofguard/network.hpp"
#include "spoofguard/optimizer.hpp"
#include "spoofguard/rng.hpp"

using namespace spoofguard;

namespace {

Tensor<float> random_input(int batch, int hw, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<float> x({batch, 1, hw, hw});
  for (auto& v : x.data) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return x;
}

}  // namespace

static void BM_TinyForwardEval(benchmark::State& state) {
  Network<float> net(NetworkConfig::tiny());
  net.init_parameters(3);
  const Tensor<float> x = random_input(1, 64, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x, false));
  }
}
BENCHMARK(BM_TinyForwardEval)->Unit(benchmark::kMillisecond);

static void BM_TinyTrainStep(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  Network<float> net(NetworkConfig::tiny());
  net.init_parameters(3);
  auto params = net.parameters();
  AdamState<float> opt;
  opt.init(params);

  const Tensor<float> x = random_input(batch, 64, 5);
  std::vector<int> labels(batch);
  for (int i = 0; i < batch; ++i) labels[i] = i % 2;

  for (auto _ : state) {
    net.zero_grads();
    Tensor<float> logits = net.forward(x, true);
    const auto loss = softmax_cross_entropy<float>(logits, labels);
    net.backward(loss.grad_logits);
    adam_step(params, opt);
    benchmark::DoNotOptimize(loss.loss);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_TinyTrainStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Conv2dForward(benchmark::State& state) {
  Conv2d<float> conv(8, 8, 3, 1, 1, false);
  Rng rng(6);
  for (auto& v : conv.weight.data) v = static_cast<float>(rng.uniform(-0.2, 0.2));
  Tensor<float> x({1, 8, 16, 16});
  for (auto& v : x.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv.forward(x));
  }
}
BENCHMARK(BM_Conv2dForward);

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spoofguard/tensor.hpp"

namespace spoofguard {

// Learning-rate presets: 1e-3 for training from scratch; 1e-6 matches the
// fine-tuning regime that assumes externally supplied pre-trained weights.
inline constexpr double kScratchLearningRate = 1e-3;
inline constexpr double kFineTuneLearningRate = 1e-6;

struct AdamConfig {
  double lr = kScratchLearningRate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment accumulators aligned with a fixed parameter list.
template <typename T>
struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;

  void init(const std::vector<NamedTensor<T>>& params) {
    m.clear();
    v.clear();
    step = 0;
    for (const auto& p : params) {
      m.emplace_back(p.tensor->numel(), T(0));
      v.emplace_back(p.tensor->numel(), T(0));
    }
  }
};

// One bias-corrected Adam update from the gradients currently held in the
// parameter tensors. The update math runs in double and narrows to T on
// store.
template <typename T>
void adam_step(std::vector<NamedTensor<T>>& params, AdamState<T>& state) {
  require(params.size() == state.m.size(),
          "adam_step: state was initialized for a different parameter list");
  state.step += 1;
  const double b1 = state.config.beta1;
  const double b2 = state.config.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor<T>& t = *params[p].tensor;
    require(t.has_grad(), "adam_step: parameter '" + params[p].name + "' has no gradient");
    require(state.m[p].size() == t.numel(),
            "adam_step: moment shape mismatch for '" + params[p].name + "'");
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const double g = static_cast<double>(t.grad[i]);
      const double m = b1 * static_cast<double>(state.m[p][i]) + (1.0 - b1) * g;
      const double v = b2 * static_cast<double>(state.v[p][i]) + (1.0 - b2) * g * g;
      state.m[p][i] = static_cast<T>(m);
      state.v[p][i] = static_cast<T>(v);
      const double m_hat = m / bias1;
      const double v_hat = v / bias2;
      t.data[i] = static_cast<T>(static_cast<double>(t.data[i]) -
                                 state.config.lr * m_hat / (std::sqrt(v_hat) + state.config.eps));
    }
  }
}

}  // namespace spoofguard

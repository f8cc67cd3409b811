#include "spoofguard/network.hpp"

#include <cmath>

#include "spoofguard/rng.hpp"

namespace spoofguard {

NetworkConfig NetworkConfig::resnet34() { return NetworkConfig{}; }

NetworkConfig NetworkConfig::tiny() {
  NetworkConfig cfg;
  cfg.stage_blocks = {1, 1, 1, 1};
  cfg.base_channels = 8;
  cfg.input_hw = 64;
  cfg.preset = "tiny";
  return cfg;
}

NetworkConfig NetworkConfig::from_preset(const std::string& name) {
  if (name == "resnet34") return resnet34();
  if (name == "tiny") return tiny();
  fail("unknown network preset '" + name + "' (expected resnet34 or tiny)");
}

void NetworkConfig::validate() const {
  for (int b : stage_blocks) require(b >= 1, "stage block counts must be >= 1");
  require(base_channels >= 1, "base_channels must be >= 1");
  require(num_classes == 2, "classifier is binary: num_classes must be 2");
  require(in_channels == 1 || in_channels == 3, "in_channels must be 1 or 3");
  require(input_hw >= 32, "input_hw must be >= 32");
}

// ---------------------------------------------------------------------------
// ResidualBlock

template <typename T>
ResidualBlock<T>::ResidualBlock(int in_ch, int out_ch, bool downsample)
    : conv1(in_ch, out_ch, 3, downsample ? 2 : 1, 1, /*with_bias=*/false),
      conv2(out_ch, out_ch, 3, 1, 1, /*with_bias=*/false),
      bn1(out_ch),
      bn2(out_ch) {
  if (downsample || in_ch != out_ch) {
    proj_ = std::make_unique<Conv2d<T>>(in_ch, out_ch, 1, downsample ? 2 : 1, 0,
                                        /*with_bias=*/false);
    proj_bn_ = std::make_unique<BatchNorm2d<T>>(out_ch);
  }
}

template <typename T>
Tensor<T> ResidualBlock<T>::forward(const Tensor<T>& x, bool train) {
  Tensor<T> f = bn2.forward(conv2.forward(relu1_.forward(bn1.forward(conv1.forward(x), train))),
                            train);
  Tensor<T> shortcut = proj_ ? proj_bn_->forward(proj_->forward(x), train) : x;
  require(f.same_shape(shortcut), "residual block: F(x) shape " + shape_string(f.shape) +
                                      " does not match shortcut shape " +
                                      shape_string(shortcut.shape));

  cached_sum_ = Tensor<T>(f.shape);
  Tensor<T> y(f.shape);
  for (std::size_t i = 0; i < f.numel(); ++i) {
    const T s = f.data[i] + shortcut.data[i];
    cached_sum_.data[i] = s;
    y.data[i] = s > T(0) ? s : T(0);
  }
  return y;
}

template <typename T>
Tensor<T> ResidualBlock<T>::backward(const Tensor<T>& grad_out) {
  // Gate through the final ReLU.
  Tensor<T> g(cached_sum_.shape);
  for (std::size_t i = 0; i < g.numel(); ++i) {
    g.data[i] = cached_sum_.data[i] > T(0) ? grad_out.data[i] : T(0);
  }

  // Residual branch.
  Tensor<T> grad_x = conv1.backward(bn1.backward(relu1_.backward(conv2.backward(bn2.backward(g)))));

  // Shortcut branch adds in; this is the path that carries the gradient
  // when the residual branch is dead.
  if (proj_) {
    const Tensor<T> gs = proj_->backward(proj_bn_->backward(g));
    for (std::size_t i = 0; i < grad_x.numel(); ++i) grad_x.data[i] += gs.data[i];
  } else {
    for (std::size_t i = 0; i < grad_x.numel(); ++i) grad_x.data[i] += g.data[i];
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// Network

template <typename T>
Network<T>::Network(const NetworkConfig& cfg)
    : cfg_(cfg),
      stem_conv_(cfg.in_channels, cfg.base_channels, 7, 2, 3, /*with_bias=*/false),
      stem_bn_(cfg.base_channels),
      stem_pool_(3, 2, 1),
      fc_(cfg.base_channels * 8, cfg.num_classes) {
  cfg_.validate();
  stages_.resize(4);
  int in_ch = cfg.base_channels;
  for (int s = 0; s < 4; ++s) {
    const int out_ch = cfg.base_channels << s;
    for (int b = 0; b < cfg.stage_blocks[s]; ++b) {
      const bool downsample = s > 0 && b == 0;
      stages_[s].emplace_back(in_ch, out_ch, downsample);
      in_ch = out_ch;
    }
  }
}

template <typename T>
void Network<T>::init_parameters(std::uint64_t seed) {
  Rng rng(Rng::mix({seed, 0x6e657477ULL}));  // distinct stream per purpose

  for (auto& named : parameters()) {
    Tensor<T>& t = *named.tensor;
    const bool is_conv_weight = t.shape.size() == 4;
    const bool is_fc_weight = named.name == "fc.weight";
    if (is_conv_weight) {
      // He-normal: std = sqrt(2 / fan_in).
      const int fan_in = t.shape[1] * t.shape[2] * t.shape[3];
      const double std_dev = std::sqrt(2.0 / fan_in);
      for (auto& v : t.data) v = static_cast<T>(rng.gaussian() * std_dev);
    } else if (is_fc_weight) {
      const int fan_in = t.shape[1];
      const double std_dev = std::sqrt(2.0 / fan_in);
      for (auto& v : t.data) v = static_cast<T>(rng.gaussian() * std_dev);
    }
    // BN gamma stays 1, beta stays 0, fc bias stays 0 (constructor state).
  }
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& x, bool train) {
  require(x.shape.size() == 4 && x.dim(1) == cfg_.in_channels &&
              x.dim(2) == cfg_.input_hw && x.dim(3) == cfg_.input_hw,
          "network input must be [N, " + std::to_string(cfg_.in_channels) + ", " +
              std::to_string(cfg_.input_hw) + ", " + std::to_string(cfg_.input_hw) +
              "], got " + shape_string(x.shape));

  Tensor<T> h = stem_pool_.forward(stem_relu_.forward(stem_bn_.forward(stem_conv_.forward(x), train)));
  for (auto& stage : stages_) {
    for (auto& block : stage) h = block.forward(h, train);
  }
  return fc_.forward(gap_.forward(h));
}

template <typename T>
Tensor<T> Network<T>::backward(const Tensor<T>& grad_logits) {
  Tensor<T> g = gap_.backward(fc_.backward(grad_logits));
  for (auto stage = stages_.rbegin(); stage != stages_.rend(); ++stage) {
    for (auto block = stage->rbegin(); block != stage->rend(); ++block) {
      g = block->backward(g);
    }
  }
  return stem_conv_.backward(stem_bn_.backward(stem_relu_.backward(stem_pool_.backward(g))));
}

template <typename T>
std::vector<NamedTensor<T>> Network<T>::parameters() {
  std::vector<NamedTensor<T>> params;
  params.push_back({"stem.conv.weight", &stem_conv_.weight});
  params.push_back({"stem.bn.gamma", &stem_bn_.gamma});
  params.push_back({"stem.bn.beta", &stem_bn_.beta});
  for (int s = 0; s < 4; ++s) {
    for (std::size_t b = 0; b < stages_[s].size(); ++b) {
      auto& blk = stages_[s][b];
      const std::string prefix =
          "stage" + std::to_string(s + 1) + ".block" + std::to_string(b) + ".";
      params.push_back({prefix + "conv1.weight", &blk.conv1.weight});
      params.push_back({prefix + "bn1.gamma", &blk.bn1.gamma});
      params.push_back({prefix + "bn1.beta", &blk.bn1.beta});
      params.push_back({prefix + "conv2.weight", &blk.conv2.weight});
      params.push_back({prefix + "bn2.gamma", &blk.bn2.gamma});
      params.push_back({prefix + "bn2.beta", &blk.bn2.beta});
      if (blk.has_projection()) {
        params.push_back({prefix + "proj.weight", &blk.proj_->weight});
        params.push_back({prefix + "proj_bn.gamma", &blk.proj_bn_->gamma});
        params.push_back({prefix + "proj_bn.beta", &blk.proj_bn_->beta});
      }
    }
  }
  params.push_back({"fc.weight", &fc_.weight});
  params.push_back({"fc.bias", &fc_.bias});
  return params;
}

template <typename T>
std::vector<NamedTensor<T>> Network<T>::state_tensors() {
  std::vector<NamedTensor<T>> state = parameters();
  state.push_back({"stem.bn.running_mean", &stem_bn_.running_mean});
  state.push_back({"stem.bn.running_var", &stem_bn_.running_var});
  for (int s = 0; s < 4; ++s) {
    for (std::size_t b = 0; b < stages_[s].size(); ++b) {
      auto& blk = stages_[s][b];
      const std::string prefix =
          "stage" + std::to_string(s + 1) + ".block" + std::to_string(b) + ".";
      state.push_back({prefix + "bn1.running_mean", &blk.bn1.running_mean});
      state.push_back({prefix + "bn1.running_var", &blk.bn1.running_var});
      state.push_back({prefix + "bn2.running_mean", &blk.bn2.running_mean});
      state.push_back({prefix + "bn2.running_var", &blk.bn2.running_var});
      if (blk.has_projection()) {
        state.push_back({prefix + "proj_bn.running_mean", &blk.proj_bn_->running_mean});
        state.push_back({prefix + "proj_bn.running_var", &blk.proj_bn_->running_var});
      }
    }
  }
  return state;
}

template <typename T>
void Network<T>::zero_grads() {
  for (auto& named : parameters()) named.tensor->zero_grad();
}

template <typename T>
int Network<T>::weighted_layer_count() const {
  int blocks = 0;
  for (int b : cfg_.stage_blocks) blocks += b;
  return 1 + 2 * blocks + 1;
}

template class ResidualBlock<float>;
template class ResidualBlock<double>;
template class Network<float>;
template class Network<double>;

}  // namespace spoofguard

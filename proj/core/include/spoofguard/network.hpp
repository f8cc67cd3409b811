#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spoofguard/layers.hpp"
#include "spoofguard/tensor.hpp"

namespace spoofguard {

// Residual classifier topology. Presets:
//   resnet34: blocks {3,4,6,3}, base 64, input 224 (34 weighted layers)
//   tiny:     blocks {1,1,1,1}, base 8,  input 64  (desk-scale runs)
// in_channels is 1 for grayscale spectrograms; 3 replicates the map so
// externally supplied image-pretrained weights can be loaded.
struct NetworkConfig {
  std::array<int, 4> stage_blocks{3, 4, 6, 3};
  int base_channels = 64;
  int input_hw = 224;
  int num_classes = 2;
  int in_channels = 1;
  std::string preset = "resnet34";

  static NetworkConfig resnet34();
  static NetworkConfig tiny();
  static NetworkConfig from_preset(const std::string& name);

  void validate() const;
};

// y = ReLU(F(x) + shortcut(x)) with F = conv3x3 -> BN -> ReLU -> conv3x3
// -> BN. The shortcut is the identity, or a strided 1x1 projection + BN
// when the block changes resolution/width.
template <typename T>
class ResidualBlock {
 public:
  ResidualBlock(int in_ch, int out_ch, bool downsample);

  Tensor<T> forward(const Tensor<T>& x, bool train);
  Tensor<T> backward(const Tensor<T>& grad_out);

  bool has_projection() const { return static_cast<bool>(proj_); }

  Conv2d<T> conv1, conv2;
  BatchNorm2d<T> bn1, bn2;
  std::unique_ptr<Conv2d<T>> proj_;
  std::unique_ptr<BatchNorm2d<T>> proj_bn_;

 private:
  Relu<T> relu1_;
  Tensor<T> cached_sum_;  // pre-activation, for the final ReLU gate
};

template <typename T>
class Network {
 public:
  explicit Network(const NetworkConfig& cfg);

  // He-normal conv init, gamma=1/beta=0, zero linear bias; fully seeded.
  void init_parameters(std::uint64_t seed);

  Tensor<T> forward(const Tensor<T>& x, bool train);
  Tensor<T> backward(const Tensor<T>& grad_logits);

  // Trainable parameters, in a fixed construction order.
  std::vector<NamedTensor<T>> parameters();
  // Parameters plus BatchNorm running statistics; what gets persisted.
  std::vector<NamedTensor<T>> state_tensors();

  void zero_grads();

  // Convolutions on the main path plus the final linear layer; projection
  // shortcuts are not counted, per the architecture's naming convention.
  int weighted_layer_count() const;

  const NetworkConfig& config() const { return cfg_; }

 private:
  NetworkConfig cfg_;
  Conv2d<T> stem_conv_;
  BatchNorm2d<T> stem_bn_;
  Relu<T> stem_relu_;
  MaxPool2d<T> stem_pool_;
  std::vector<std::vector<ResidualBlock<T>>> stages_;
  GlobalAvgPool<T> gap_;
  Linear<T> fc_;
};

extern template class ResidualBlock<float>;
extern template class ResidualBlock<double>;
extern template class Network<float>;
extern template class Network<double>;

}  // namespace spoofguard

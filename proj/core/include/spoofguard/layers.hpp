#pragma once

#include <span>
#include <vector>

#include "spoofguard/tensor.hpp"

namespace spoofguard {

// Layers cache whatever the backward pass needs during forward. Backward
// accumulates into the parameter gradient buffers and returns the gradient
// with respect to the layer input. All reductions accumulate in double
// regardless of the storage type T.

template <typename T>
class Conv2d {
 public:
  Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad, bool with_bias);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& grad_out);

  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }
  int kernel() const { return kernel_; }
  int stride() const { return stride_; }
  int pad() const { return pad_; }
  bool with_bias() const { return with_bias_; }

  Tensor<T> weight;  // [out_ch, in_ch, k, k]
  Tensor<T> bias;    // [out_ch] when with_bias

 private:
  int in_ch_, out_ch_, kernel_, stride_, pad_;
  bool with_bias_;
  Tensor<T> cached_x_;
};

template <typename T>
class BatchNorm2d {
 public:
  explicit BatchNorm2d(int channels, double eps = 1e-5, double momentum = 0.1);

  Tensor<T> forward(const Tensor<T>& x, bool train);
  Tensor<T> backward(const Tensor<T>& grad_out);

  int channels() const { return channels_; }

  Tensor<T> gamma, beta;                   // learnable, [C]
  Tensor<T> running_mean, running_var;     // state buffers, [C]

 private:
  int channels_;
  double eps_, momentum_;
  bool last_train_ = false;
  Tensor<T> cached_x_;
  std::vector<double> cached_mean_, cached_inv_std_;
};

template <typename T>
class Relu {
 public:
  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& grad_out);

 private:
  Tensor<T> cached_x_;
};

template <typename T>
class MaxPool2d {
 public:
  MaxPool2d(int kernel, int stride, int pad);

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& grad_out);

 private:
  int kernel_, stride_, pad_;
  std::vector<int> in_shape_;
  std::vector<std::size_t> argmax_;  // flat input index per output element
};

template <typename T>
class GlobalAvgPool {
 public:
  Tensor<T> forward(const Tensor<T>& x);  // NCHW -> [N, C]
  Tensor<T> backward(const Tensor<T>& grad_out);

 private:
  std::vector<int> in_shape_;
};

template <typename T>
class Linear {
 public:
  Linear(int in_features, int out_features);

  Tensor<T> forward(const Tensor<T>& x);  // [N, in] -> [N, out]
  Tensor<T> backward(const Tensor<T>& grad_out);

  int in_features() const { return in_; }
  int out_features() const { return out_; }

  Tensor<T> weight;  // [out, in]
  Tensor<T> bias;    // [out]

 private:
  int in_, out_;
  Tensor<T> cached_x_;
};

// Mean negative log-softmax of the true class, stabilized by max
// subtraction. Labels: 0 = spoof, 1 = bonafide. grad_logits is the
// gradient of the mean loss.
template <typename T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> grad_logits;
};

template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels);

// Row-wise softmax of a [N, K] tensor, in double precision.
template <typename T>
std::vector<double> softmax_rows(const Tensor<T>& logits);

extern template class Conv2d<float>;
extern template class Conv2d<double>;
extern template class BatchNorm2d<float>;
extern template class BatchNorm2d<double>;
extern template class Relu<float>;
extern template class Relu<double>;
extern template class MaxPool2d<float>;
extern template class MaxPool2d<double>;
extern template class GlobalAvgPool<float>;
extern template class GlobalAvgPool<double>;
extern template class Linear<float>;
extern template class Linear<double>;
extern template LossResult<float> softmax_cross_entropy<float>(const Tensor<float>&,
                                                               std::span<const int>);
extern template LossResult<double> softmax_cross_entropy<double>(const Tensor<double>&,
                                                                 std::span<const int>);
extern template std::vector<double> softmax_rows<float>(const Tensor<float>&);
extern template std::vector<double> softmax_rows<double>(const Tensor<double>&);

}  // namespace spoofguard

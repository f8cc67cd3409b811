#include "spoofguard/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spoofguard {

namespace {

int conv_out_dim(int in, int pad, int kernel, int stride) {
  return (in + 2 * pad - kernel) / stride + 1;
}

void check_nchw(const Tensor<auto>& x, const char* who) {
  require(x.shape.size() == 4, std::string(who) + ": expected NCHW tensor, got shape " +
                                   shape_string(x.shape));
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d

template <typename T>
Conv2d<T>::Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad, bool with_bias)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride), pad_(pad),
      with_bias_(with_bias) {
  require(in_ch >= 1 && out_ch >= 1 && kernel >= 1, "Conv2d: bad channel/kernel config");
  require(stride >= 1 && pad >= 0, "Conv2d: bad stride/pad");
  weight = Tensor<T>({out_ch, in_ch, kernel, kernel});
  weight.alloc_grad();
  if (with_bias_) {
    bias = Tensor<T>({out_ch});
    bias.alloc_grad();
  }
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  check_nchw(x, "Conv2d");
  require(x.dim(1) == in_ch_, "Conv2d: input has " + std::to_string(x.dim(1)) +
                                  " channels, layer expects " + std::to_string(in_ch_));
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const int oh = conv_out_dim(h, pad_, kernel_, stride_);
  const int ow = conv_out_dim(w, pad_, kernel_, stride_);
  require(oh >= 1 && ow >= 1, "Conv2d: input smaller than kernel");

  cached_x_ = x;
  Tensor<T> y({n, out_ch_, oh, ow});
  for (int b = 0; b < n; ++b) {
    for (int oc = 0; oc < out_ch_; ++oc) {
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
          double acc = with_bias_ ? static_cast<double>(bias.data[oc]) : 0.0;
          const int hi0 = i * stride_ - pad_;
          const int wi0 = j * stride_ - pad_;
          for (int ic = 0; ic < in_ch_; ++ic) {
            for (int ki = 0; ki < kernel_; ++ki) {
              const int hi = hi0 + ki;
              if (hi < 0 || hi >= h) continue;
              for (int kj = 0; kj < kernel_; ++kj) {
                const int wi = wi0 + kj;
                if (wi < 0 || wi >= w) continue;
                acc += static_cast<double>(x.at4(b, ic, hi, wi)) *
                       static_cast<double>(weight.at4(oc, ic, ki, kj));
              }
            }
          }
          y.at4(b, oc, i, j) = static_cast<T>(acc);
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& grad_out) {
  const Tensor<T>& x = cached_x_;
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const int oh = grad_out.dim(2), ow = grad_out.dim(3);

  std::vector<double> dx(x.numel(), 0.0);
  std::vector<double> dw(weight.numel(), 0.0);
  std::vector<double> db(with_bias_ ? static_cast<std::size_t>(out_ch_) : 0, 0.0);

  const auto x_idx = [&](int b, int c, int i, int j) {
    return ((static_cast<std::size_t>(b) * in_ch_ + c) * h + i) * w + j;
  };
  const auto w_idx = [&](int oc, int ic, int ki, int kj) {
    return ((static_cast<std::size_t>(oc) * in_ch_ + ic) * kernel_ + ki) * kernel_ + kj;
  };

  for (int b = 0; b < n; ++b) {
    for (int oc = 0; oc < out_ch_; ++oc) {
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
          const double g = static_cast<double>(grad_out.at4(b, oc, i, j));
          if (with_bias_) db[oc] += g;
          const int hi0 = i * stride_ - pad_;
          const int wi0 = j * stride_ - pad_;
          for (int ic = 0; ic < in_ch_; ++ic) {
            for (int ki = 0; ki < kernel_; ++ki) {
              const int hi = hi0 + ki;
              if (hi < 0 || hi >= h) continue;
              for (int kj = 0; kj < kernel_; ++kj) {
                const int wi = wi0 + kj;
                if (wi < 0 || wi >= w) continue;
                dw[w_idx(oc, ic, ki, kj)] +=
                    g * static_cast<double>(x.at4(b, ic, hi, wi));
                dx[x_idx(b, ic, hi, wi)] +=
                    g * static_cast<double>(weight.at4(oc, ic, ki, kj));
              }
            }
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < dw.size(); ++i) weight.grad[i] += static_cast<T>(dw[i]);
  if (with_bias_) {
    for (int oc = 0; oc < out_ch_; ++oc) bias.grad[oc] += static_cast<T>(db[oc]);
  }

  Tensor<T> grad_x(x.shape);
  for (std::size_t i = 0; i < dx.size(); ++i) grad_x.data[i] = static_cast<T>(dx[i]);
  return grad_x;
}

// ---------------------------------------------------------------------------
// BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(int channels, double eps, double momentum)
    : channels_(channels), eps_(eps), momentum_(momentum) {
  require(channels >= 1, "BatchNorm2d: channels must be >= 1");
  gamma = Tensor<T>({channels});
  beta = Tensor<T>({channels});
  std::fill(gamma.data.begin(), gamma.data.end(), T(1));
  gamma.alloc_grad();
  beta.alloc_grad();
  running_mean = Tensor<T>({channels});
  running_var = Tensor<T>({channels});
  std::fill(running_var.data.begin(), running_var.data.end(), T(1));
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, bool train) {
  check_nchw(x, "BatchNorm2d");
  require(x.dim(1) == channels_, "BatchNorm2d: channel mismatch");
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const double m = static_cast<double>(n) * h * w;

  cached_x_ = x;
  last_train_ = train;
  cached_mean_.assign(channels_, 0.0);
  cached_inv_std_.assign(channels_, 0.0);

  Tensor<T> y(x.shape);
  for (int c = 0; c < channels_; ++c) {
    double mean, var;
    if (train) {
      double sum = 0.0, sum_sq = 0.0;
      for (int b = 0; b < n; ++b) {
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            const double v = static_cast<double>(x.at4(b, c, i, j));
            sum += v;
            sum_sq += v * v;
          }
        }
      }
      mean = sum / m;
      var = std::max(0.0, sum_sq / m - mean * mean);  // biased, used to normalize

      // Running stats keep the unbiased variance estimate.
      const double unbiased = m > 1.0 ? var * m / (m - 1.0) : var;
      running_mean.data[c] = static_cast<T>((1.0 - momentum_) *
                                                static_cast<double>(running_mean.data[c]) +
                                            momentum_ * mean);
      running_var.data[c] = static_cast<T>((1.0 - momentum_) *
                                               static_cast<double>(running_var.data[c]) +
                                           momentum_ * unbiased);
    } else {
      mean = static_cast<double>(running_mean.data[c]);
      var = static_cast<double>(running_var.data[c]);
    }

    const double inv_std = 1.0 / std::sqrt(var + eps_);
    cached_mean_[c] = mean;
    cached_inv_std_[c] = inv_std;
    const double g = static_cast<double>(gamma.data[c]);
    const double bta = static_cast<double>(beta.data[c]);
    for (int b = 0; b < n; ++b) {
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          const double xhat = (static_cast<double>(x.at4(b, c, i, j)) - mean) * inv_std;
          y.at4(b, c, i, j) = static_cast<T>(g * xhat + bta);
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& grad_out) {
  const Tensor<T>& x = cached_x_;
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const double m = static_cast<double>(n) * h * w;

  Tensor<T> grad_x(x.shape);
  for (int c = 0; c < channels_; ++c) {
    const double mean = cached_mean_[c];
    const double inv_std = cached_inv_std_[c];
    const double g = static_cast<double>(gamma.data[c]);

    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int b = 0; b < n; ++b) {
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          const double dy = static_cast<double>(grad_out.at4(b, c, i, j));
          const double xhat = (static_cast<double>(x.at4(b, c, i, j)) - mean) * inv_std;
          sum_dy += dy;
          sum_dy_xhat += dy * xhat;
        }
      }
    }
    gamma.grad[c] += static_cast<T>(sum_dy_xhat);
    beta.grad[c] += static_cast<T>(sum_dy);

    if (last_train_) {
      // Batch statistics are functions of x, so their gradients flow back.
      for (int b = 0; b < n; ++b) {
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            const double dy = static_cast<double>(grad_out.at4(b, c, i, j));
            const double xhat = (static_cast<double>(x.at4(b, c, i, j)) - mean) * inv_std;
            const double dx =
                g * inv_std * (dy - sum_dy / m - xhat * sum_dy_xhat / m);
            grad_x.at4(b, c, i, j) = static_cast<T>(dx);
          }
        }
      }
    } else {
      for (int b = 0; b < n; ++b) {
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            const double dy = static_cast<double>(grad_out.at4(b, c, i, j));
            grad_x.at4(b, c, i, j) = static_cast<T>(g * inv_std * dy);
          }
        }
      }
    }
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// Relu

template <typename T>
Tensor<T> Relu<T>::forward(const Tensor<T>& x) {
  cached_x_ = x;
  Tensor<T> y(x.shape);
  for (std::size_t i = 0; i < x.numel(); ++i) y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
  return y;
}

template <typename T>
Tensor<T> Relu<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> grad_x(cached_x_.shape);
  for (std::size_t i = 0; i < grad_x.numel(); ++i) {
    grad_x.data[i] = cached_x_.data[i] > T(0) ? grad_out.data[i] : T(0);
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// MaxPool2d

template <typename T>
MaxPool2d<T>::MaxPool2d(int kernel, int stride, int pad)
    : kernel_(kernel), stride_(stride), pad_(pad) {
  require(kernel >= 1 && stride >= 1 && pad >= 0, "MaxPool2d: bad config");
}

template <typename T>
Tensor<T> MaxPool2d<T>::forward(const Tensor<T>& x) {
  check_nchw(x, "MaxPool2d");
  const int n = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int oh = conv_out_dim(h, pad_, kernel_, stride_);
  const int ow = conv_out_dim(w, pad_, kernel_, stride_);
  require(oh >= 1 && ow >= 1, "MaxPool2d: input smaller than kernel");

  in_shape_ = x.shape;
  Tensor<T> y({n, ch, oh, ow});
  argmax_.assign(y.numel(), 0);

  std::size_t out_idx = 0;
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < ch; ++c) {
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j, ++out_idx) {
          T best = std::numeric_limits<T>::lowest();
          std::size_t best_idx = 0;
          for (int ki = 0; ki < kernel_; ++ki) {
            const int hi = i * stride_ - pad_ + ki;
            if (hi < 0 || hi >= h) continue;
            for (int kj = 0; kj < kernel_; ++kj) {
              const int wi = j * stride_ - pad_ + kj;
              if (wi < 0 || wi >= w) continue;
              const T v = x.at4(b, c, hi, wi);
              if (v > best) {
                best = v;
                best_idx = ((static_cast<std::size_t>(b) * ch + c) * h + hi) * w + wi;
              }
            }
          }
          y.data[out_idx] = best;
          argmax_[out_idx] = best_idx;
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> grad_x(in_shape_);
  for (std::size_t i = 0; i < grad_out.numel(); ++i) {
    grad_x.data[argmax_[i]] += grad_out.data[i];
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// GlobalAvgPool

template <typename T>
Tensor<T> GlobalAvgPool<T>::forward(const Tensor<T>& x) {
  check_nchw(x, "GlobalAvgPool");
  const int n = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
  in_shape_ = x.shape;

  Tensor<T> y({n, ch});
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < ch; ++c) {
      double acc = 0.0;
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) acc += static_cast<double>(x.at4(b, c, i, j));
      }
      y.at2(b, c) = static_cast<T>(acc / (static_cast<double>(h) * w));
    }
  }
  return y;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::backward(const Tensor<T>& grad_out) {
  const int n = in_shape_[0], ch = in_shape_[1], h = in_shape_[2], w = in_shape_[3];
  Tensor<T> grad_x(in_shape_);
  const double scale = 1.0 / (static_cast<double>(h) * w);
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < ch; ++c) {
      const T g = static_cast<T>(static_cast<double>(grad_out.at2(b, c)) * scale);
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) grad_x.at4(b, c, i, j) = g;
      }
    }
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// Linear

template <typename T>
Linear<T>::Linear(int in_features, int out_features) : in_(in_features), out_(out_features) {
  require(in_features >= 1 && out_features >= 1, "Linear: bad feature counts");
  weight = Tensor<T>({out_features, in_features});
  weight.alloc_grad();
  bias = Tensor<T>({out_features});
  bias.alloc_grad();
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x) {
  require(x.shape.size() == 2 && x.dim(1) == in_,
          "Linear: expected [N, " + std::to_string(in_) + "], got " + shape_string(x.shape));
  cached_x_ = x;
  const int n = x.dim(0);

  Tensor<T> y({n, out_});
  for (int b = 0; b < n; ++b) {
    for (int o = 0; o < out_; ++o) {
      double acc = static_cast<double>(bias.data[o]);
      for (int i = 0; i < in_; ++i) {
        acc += static_cast<double>(x.at2(b, i)) * static_cast<double>(weight.at2(o, i));
      }
      y.at2(b, o) = static_cast<T>(acc);
    }
  }
  return y;
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& grad_out) {
  const Tensor<T>& x = cached_x_;
  const int n = x.dim(0);

  for (int o = 0; o < out_; ++o) {
    double db = 0.0;
    for (int b = 0; b < n; ++b) db += static_cast<double>(grad_out.at2(b, o));
    bias.grad[o] += static_cast<T>(db);
    for (int i = 0; i < in_; ++i) {
      double dw = 0.0;
      for (int b = 0; b < n; ++b) {
        dw += static_cast<double>(grad_out.at2(b, o)) * static_cast<double>(x.at2(b, i));
      }
      weight.grad[static_cast<std::size_t>(o) * in_ + i] += static_cast<T>(dw);
    }
  }

  Tensor<T> grad_x(x.shape);
  for (int b = 0; b < n; ++b) {
    for (int i = 0; i < in_; ++i) {
      double acc = 0.0;
      for (int o = 0; o < out_; ++o) {
        acc += static_cast<double>(grad_out.at2(b, o)) * static_cast<double>(weight.at2(o, i));
      }
      grad_x.at2(b, i) = static_cast<T>(acc);
    }
  }
  return grad_x;
}

// ---------------------------------------------------------------------------
// Softmax cross entropy

template <typename T>
std::vector<double> softmax_rows(const Tensor<T>& logits) {
  require(logits.shape.size() == 2, "softmax_rows: expected [N, K]");
  const int n = logits.dim(0), k = logits.dim(1);
  std::vector<double> probs(static_cast<std::size_t>(n) * k);
  for (int b = 0; b < n; ++b) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) mx = std::max(mx, static_cast<double>(logits.at2(b, c)));
    double denom = 0.0;
    for (int c = 0; c < k; ++c) {
      const double e = std::exp(static_cast<double>(logits.at2(b, c)) - mx);
      probs[static_cast<std::size_t>(b) * k + c] = e;
      denom += e;
    }
    for (int c = 0; c < k; ++c) probs[static_cast<std::size_t>(b) * k + c] /= denom;
  }
  return probs;
}

template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  require(logits.shape.size() == 2, "softmax_cross_entropy: expected [N, K] logits");
  const int n = logits.dim(0), k = logits.dim(1);
  require(static_cast<std::size_t>(n) == labels.size(),
          "softmax_cross_entropy: batch size mismatch");
  for (int lbl : labels) {
    require(lbl >= 0 && lbl < k, "softmax_cross_entropy: label out of range");
  }

  const std::vector<double> probs = softmax_rows(logits);
  LossResult<T> result;
  result.grad_logits = Tensor<T>(logits.shape);

  double total = 0.0;
  for (int b = 0; b < n; ++b) {
    const double p_true = probs[static_cast<std::size_t>(b) * k + labels[b]];
    total += -std::log(std::max(p_true, 1e-300));
    for (int c = 0; c < k; ++c) {
      const double p = probs[static_cast<std::size_t>(b) * k + c];
      const double target = c == labels[b] ? 1.0 : 0.0;
      result.grad_logits.at2(b, c) = static_cast<T>((p - target) / n);
    }
  }
  result.loss = total / n;
  return result;
}

template class Conv2d<float>;
template class Conv2d<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class Relu<float>;
template class Relu<double>;
template class MaxPool2d<float>;
template class MaxPool2d<double>;
template class GlobalAvgPool<float>;
template class GlobalAvgPool<double>;
template class Linear<float>;
template class Linear<double>;
template LossResult<float> softmax_cross_entropy<float>(const Tensor<float>&,
                                                        std::span<const int>);
template LossResult<double> softmax_cross_entropy<double>(const Tensor<double>&,
                                                          std::span<const int>);
template std::vector<double> softmax_rows<float>(const Tensor<float>&);
template std::vector<double> softmax_rows<double>(const Tensor<double>&);

}  // namespace spoofguard

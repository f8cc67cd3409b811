#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "spoofguard/error.hpp"

namespace spoofguard {

// Dense row-major n-d array. T is float for training/scoring (32-bit
// storage) and double for the finite-difference gradient harness. The
// gradient buffer is allocated only for tensors that need one.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty or same length as data

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), T(0));
  }

  static std::size_t numel_of(const std::vector<int>& s) {
    std::size_t n = 1;
    for (int d : s) {
      require(d >= 0, "negative tensor dimension");
      n *= static_cast<std::size_t>(d);
    }
    return n;
  }

  std::size_t numel() const { return data.size(); }

  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  void alloc_grad() { grad.assign(data.size(), T(0)); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
  bool has_grad() const { return !grad.empty(); }

  // NCHW accessors.
  T& at4(int n, int c, int h, int w) {
    return data[((static_cast<std::size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }
  T at4(int n, int c, int h, int w) const {
    return data[((static_cast<std::size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }
  T& at2(int r, int c) { return data[static_cast<std::size_t>(r) * shape[1] + c]; }
  T at2(int r, int c) const { return data[static_cast<std::size_t>(r) * shape[1] + c]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

inline std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Named handle to a parameter (or state buffer) living inside a layer.
template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T>* tensor = nullptr;
};

}  // namespace spoofguard

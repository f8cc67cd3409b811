#include "spoofguard/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "spoofguard/error.hpp"

namespace spoofguard {

void fft_radix2(std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  require(n >= 1 && std::has_single_bit(n),
          "FFT length must be a power of two, got " + std::to_string(n));
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& c : x) c *= inv_n;
  }
}

std::vector<double> fft_power(std::span<const double> frame) {
  const std::size_t n = frame.size();
  require(n >= 2 && std::has_single_bit(n),
          "fft_power frame length must be a power of two >= 2, got " + std::to_string(n));

  std::vector<std::complex<double>> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = frame[i];
  fft_radix2(x);

  std::vector<double> power(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) power[k] = std::norm(x[k]);
  return power;
}

}  // namespace spoofguard

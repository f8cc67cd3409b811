#pragma once

#include <complex>
#include <span>
#include <vector>

namespace spoofguard {

// In-place iterative radix-2 Cooley-Tukey. Length must be a power of two.
// The inverse applies the 1/n scaling.
void fft_radix2(std::vector<std::complex<double>>& x, bool inverse = false);

// Power spectrum of a real frame: bin k holds |X[k]|^2 for k in
// [0, n/2], n a power of two.
std::vector<double> fft_power(std::span<const double> frame);

}  // namespace spoofguard

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace spoofguard {

// Deterministic generator with bit-stable output on every platform.
// std::mt19937 is portable but the standard distributions are not, so the
// uniform/gaussian draws are implemented here explicitly. Everything that
// ends up in an artifact file (corpus audio, weight init, batch order) must
// draw from this class and nothing else.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // A couple of warm-up outputs so that small seeds (0, 1, 7) do not
    // leak their raw bit patterns into the first draws.
    next_u64();
    next_u64();
  }

  // splitmix64 step.
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range, unbiased via rejection.
  std::uint64_t uniform_u64(std::uint64_t n) {  // [0, n)
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform_u64(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Standard normal via Box-Muller; second value cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Hash-combines stream labels into a child seed, so independent
  // substreams (per utterance, per epoch) never overlap.
  static std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;  // arbitrary odd constant
    for (std::uint64_t p : parts) {
      h ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
      h ^= h >> 33;
    }
    return h;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Fisher-Yates with explicit draws; std::shuffle is not seed-portable.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_u64(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace spoofguard

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gsmsim {

// Deterministic pseudo-random stream. A stream is identified by (seed, label,
// substream); the same identity always reproduces the same draw sequence, so
// toggling one traffic class cannot perturb the draws of another. Based on
// splitmix64: 8 bytes of state, pure 64-bit arithmetic, portable output.
class RngStream {
 public:
  RngStream() = default;

  RngStream(std::uint64_t seed, std::string_view label, std::uint64_t substream = 0) {
    state_ = mix(mix(seed ^ 0x9e3779b97f4a7c15ull, fnv1a(label)), substream);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 significant bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in {0, .., n-1} (n >= 1), via 128-bit multiply (no modulo bias
  // worth caring about at these ranges, and fully deterministic).
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log1p(-next_double()) / rate; }

  // Beta(3,4) variate by inverting the closed-form CDF with bisection.
  double beta34() { return beta34_inv(next_double()); }

  // Regularized incomplete beta I_x(3,4): closed-form polynomial.
  static double beta34_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double y = 1.0 - x;
    return x * x * x * (20.0 * y * y * y + x * (15.0 * y * y + x * (6.0 * y + x)));
  }

  static double beta34_inv(double u) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 64; ++i) {
      const double mid = 0.5 * (lo + hi);
      (beta34_cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return h;
  }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0x853c49e6748fea9bull;
};

}  // namespace gsmsim

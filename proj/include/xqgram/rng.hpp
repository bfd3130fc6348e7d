#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace xqgram {

namespace detail {

// splitmix64 mixing step; used to derive well-separated engine seeds from
// (seed, index...) tuples.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Seedable random stream with deterministic substream derivation. Substream
// (seed, a, b, c) depends only on its arguments, so parallel work units get
// reproducible, well-separated streams regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed, 0, 0, 0)) {}

  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    return Rng(mix_seed(seed, a, b, c), 0);
  }

  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  // Inclusive range.
  long uniform_int(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(engine_);
  }

  // Geometric draw with success probability gamma and support {1, 2, ...}:
  // P(L = l) = gamma * (1 - gamma)^(l-1). Sampled by CDF inversion.
  long geometric(double gamma) {
    double u = uniform01();
    // Smallest l with 1 - (1-gamma)^l >= u.
    double l = std::ceil(std::log1p(-u) / std::log1p(-gamma));
    if (!(l >= 1.0)) return 1;
    if (l > 9.0e18) return static_cast<long>(9.0e18);
    return static_cast<long>(l);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  Rng(std::uint64_t raw, int) : engine_(raw) {}

  static std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b, std::uint64_t c) {
    std::uint64_t state = seed;
    std::uint64_t h = detail::splitmix64(state);
    state ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= detail::splitmix64(state);
    state ^= b + 0xc2b2ae3d27d4eb4fULL;
    h ^= detail::splitmix64(state);
    state ^= c + 0x165667b19e3779f9ULL;
    h ^= detail::splitmix64(state);
    return h;
  }

  std::mt19937_64 engine_;
};

}  // namespace xqgram

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace lrp {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (mix64(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

// Stream tags separating uses of one master seed.
enum class StreamTag : std::uint64_t {
  Cluster = 1,
  Ladder = 2,
  Full = 3,
  Overlay = 4,
  Kappa = 5,
  Instance = 6,
  Synthetic = 7,
  BetaC = 8,
};

// SplitMix64 stream; keyed construction gives independent counter-based streams.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t state = 0) : state_(state) {}

  static Rng keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    return Rng(hash_combine(hash_combine(hash_combine(mix64(seed), a), b), c));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in (0,1), never 0.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform()); }

  std::uint64_t below(std::uint64_t n) {
    // Lemire-style multiply, rejection for exact uniformity.
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace lrp

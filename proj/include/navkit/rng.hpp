#pragma once
// Deterministic randomness. Everything random in this project flows through
// SplitMix64, so runs reproduce bit-for-bit across platforms and are not
// tied to libstdc++ distribution internals.
//
// Parallel workers use independent streams derived from a root seed:
//   derive_stream(root, k).state == mix64(root + GOLDEN * (k + 1))
// The same (root, k) always yields the same stream; this is the split
// function relied on by samplers, evaluation shards and batch prefetch.

#include <cstdint>
#include <cmath>

namespace navkit {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// murmur3 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDull;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ull;
  z ^= z >> 33;
  return z;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [0, n), unbiased (masked rejection); n must be >= 1
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      std::uint64_t v = next_u64() & mask;
      if (v < n) return v;
    }
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

  bool bernoulli(double p) { return next_double() < p; }

  // standard normal via Box-Muller; consumes two draws
  double normal() {
    double u;
    do {
      u = next_double();
    } while (u <= 0.0);
    double v = next_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.28318530717958647692 * v);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

inline Rng derive_stream(std::uint64_t root, std::uint64_t stream) {
  return Rng(mix64(root + kGolden * (stream + 1)));
}

}  // namespace navkit

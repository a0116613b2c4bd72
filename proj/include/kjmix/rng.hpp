#pragma once

#include <cstdint>

namespace kjmix {

namespace detail {
// splitmix64 finalizer (Steele, Lea, Flood 2014); full 64-bit avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// splitmix64 stream; identical output on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return detail::mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

/// Stable seed derivation for independent streams (per start, replicate, element).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return detail::mix64(detail::mix64(a + 0x9e3779b97f4a7c15ull) ^ (b + 0x6a09e667f3bcc909ull));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

}  // namespace kjmix

#pragma once

#include <cstdint>

#include "errors.hpp"

namespace strippack {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen because its output sequence is
// fully specified by a few lines of integer arithmetic, so seeded instances are
// bit-identical on every platform and standard library. std::mt19937 is
// portable too, but the std distributions layered on top of it are not.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound) by rejection; unbiased.
  constexpr std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw ContractViolation("SplitMix64::below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform integer in [lo, hi], inclusive.
  constexpr std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw ContractViolation("SplitMix64::uniform: empty range");
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from (base, stream) so that policies and
// instance generation never share a sequence even when fed the same seed.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  SplitMix64 g(base ^ (stream * 0xD1B54A32D192ED03ull));
  return g.next();
}

}  // namespace strippack

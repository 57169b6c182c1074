#pragma once

#include <cstdint>
#include <string_view>

namespace modmark {

// Every random draw in this library flows through SplitMix64 so that a
// (seed, input) pair maps to the same byte stream on every platform.
// Standard-library distributions are avoided on purpose: their output is
// implementation-defined. The algorithm name recorded in run metadata is
// kPrngName.
inline constexpr const char* kPrngName = "splitmix64-v1";

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, bound) by rejection.
  uint64_t next_below(uint64_t bound) {
    if (bound <= 1) return 0;
    uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

constexpr uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent sub-seed for a named stage. Used everywhere a run
// seed fans out into per-stage streams, so re-running one stage never
// perturbs another.
inline uint64_t derive_seed(uint64_t root, std::string_view label) {
  SplitMix64 mix(root ^ fnv1a64(label));
  return mix.next();
}

inline uint64_t derive_seed(uint64_t root, std::string_view label, uint64_t index) {
  SplitMix64 mix(derive_seed(root, label) ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return mix.next();
}

}  // namespace modmark

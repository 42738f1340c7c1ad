#pragma once

#include <cstdint>
#include <limits>

namespace sent {

// Deterministic counter-based RNG. Evaluation work items derive a stream
// from (global seed, graph index, permutation index) so results are
// bit-identical regardless of worker count or platform. std:: distributions
// are implementation-defined and must not be used on hot paths that feed
// into output files.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed ^ kGamma) {}

  uint64_t next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Uniform double in [0, 1).
  double real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static constexpr uint64_t kGamma = 0x6a09e667f3bcc909ULL;
  uint64_t state_;
};

// Mixes a base seed with stream coordinates into a fresh stream key.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  auto mix = [](uint64_t x) {
    x = (x ^ (x >> 33)) * 0xff51afd7ed558ccdULL;
    x = (x ^ (x >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return x ^ (x >> 33);
  };
  return mix(mix(seed + 0x9e3779b97f4a7c15ULL * (a + 1)) ^ (b + 0x2545f4914f6cdd1dULL));
}

}  // namespace sent

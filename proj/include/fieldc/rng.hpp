#pragma once

#include <cstdint>

namespace fieldc {

// Deterministic generator with a portable output sequence. The standard
// distributions are implementation-defined, so uniform draws are derived
// from the raw 64-bit stream directly.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t nextU64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double nextDouble() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n).
  uint64_t nextIndex(uint64_t n) { return n == 0 ? 0 : nextU64() % n; }

  bool nextBool() { return (nextU64() & 1) != 0; }

 private:
  uint64_t state_;
};

// Derives an independent stream from a base seed and a stream label.
inline uint64_t deriveSeed(uint64_t seed, uint64_t stream) {
  Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return r.nextU64();
}

}  // namespace fieldc

#pragma once
// Deterministic randomness for the whole pipeline. Outputs must be a pure
// function of the seed across platforms, so the generator, the uniform
// mapping and the Poisson sampler are all pinned down here instead of
// delegating to std:: distributions, whose algorithms are
// implementation-defined.

#include <cstdint>

namespace rainsim {

// SplitMix64 finalizer over a combined word. Used to derive independent
// substream seeds, e.g. per streak layer or per dataset variant.
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b), c);
}

// SplitMix64 stream generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 bits of precision.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

  // Uniform integer in [0, n). n must be positive.
  std::int64_t below(std::int64_t n);

  // Poisson-distributed count. Inversion by sequential search for small
  // means, Hormann's PTRS transformed rejection for large ones.
  std::int64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

}  // namespace rainsim

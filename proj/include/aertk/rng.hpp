#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aertk {

// Seeded random source with fixed derivations on top of std::mt19937_64.
// The standard library distributions are implementation-defined, so every
// value here is derived from raw engine output with explicit arithmetic;
// a given seed produces the same sequence on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t bounded(std::uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Box-Muller transform (pairs are cached).
  double normal();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// FNV-1a over the bytes of a string. Used to derive stable per-name seeds.
std::uint64_t fnv1a64(std::string_view text);

// Mixes two seeds into one (splitmix64 finalizer over their combination).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

} // namespace aertk

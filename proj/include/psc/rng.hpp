#pragma once

#include <cstdint>

namespace psc {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen as the single generator for the
// whole project: trivially seedable, stable across platforms and compilers,
// and fast enough that it never shows up in profiles next to the SC passes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with the canonical 53-bit construction.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Bernoulli(p1) as a bit.
  int bit(double p1) { return uniform01() < p1 ? 1 : 0; }

  int fair_bit() { return static_cast<int>(next_u64() >> 63); }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Stream roles used in counter-mode seed derivation. A derived seed is a pure
// function of (master, a, b, role), so expanding one master seed into per-trial
// streams never depends on scheduling or thread count.
enum class StreamRole : std::uint64_t {
  kSource = 1,
  kFrozen = 2,
  kRounding = 3,
  kConstruction = 4,
  kObservation = 5,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                                 StreamRole role) {
  using detail::mix64;
  std::uint64_t s = mix64(master);
  s = mix64(s ^ a);
  s = mix64(s ^ b);
  s = mix64(s ^ static_cast<std::uint64_t>(role));
  return s;
}

}  // namespace psc

#pragma once

#include <cmath>
#include <cstdint>

namespace wl1 {

// Counter-based generator (scheme "wl1-splitmix64-v1"): every output is a
// pure function of (seed, stream, counter), so draws are reproducible and
// order-independent across threads.  Streams keep the matrix, support and
// amplitude draws independent given one seed:
//   stream 0 = measurement matrix entries
//   stream 1 = support indicator uniforms
//   stream 2 = nonzero amplitudes
inline constexpr std::uint64_t kStreamMatrix = 0;
inline constexpr std::uint64_t kStreamSupport = 1;
inline constexpr std::uint64_t kStreamAmplitude = 2;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) {
  // Chained finalizers decorrelate the three key words.
  return detail::splitmix64(detail::splitmix64(detail::splitmix64(seed) ^ stream) ^ counter);
}

// Derives a child seed, used to give every experiment trial its own
// independent instance seed from (base_seed, grid point, trial).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return rng_word(base, 0x5eed5eed5eed5eedull ^ a, b);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), counter_(0) {}

  std::uint64_t next_u64() { return rng_word(seed_, stream_, counter_++); }

  // uniform in (0, 1]: top 53 bits, shifted away from zero so log() is safe
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
  }

  // Box-Muller; consumes two words per call (no caching, so the draw at
  // counter c never depends on how earlier draws were consumed).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double rademacher() { return (next_u64() & 1) ? 1.0 : -1.0; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_;
};

}  // namespace wl1

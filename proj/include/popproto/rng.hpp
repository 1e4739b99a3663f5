#pragma once

#include <cstdint>

namespace popproto {

/// SplitMix64 finaliser (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Top 53 bits of a word as a uniform double in [0, 1).
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// SplitMix64 generator. Used for graph generation, initial states and the
/// per-step scheduler streams; the algorithm is fixed so that every run is
/// reproducible across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  double uniform() noexcept { return to_unit(next()); }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject). bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool coin() noexcept { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

/// The random stream consumed by scheduler step t of a run seeded with `seed`.
/// Streams for distinct (seed, t) pairs are keyed through two SplitMix64
/// rounds, so any step can be replayed without replaying its predecessors.
inline SplitMix64 step_stream(std::uint64_t seed, std::uint64_t t) noexcept {
  return SplitMix64(mix64(mix64(seed) ^ t));
}

/// Independent stream for initial-state sampling under a given run seed.
inline SplitMix64 init_stream(std::uint64_t seed) noexcept {
  return SplitMix64(mix64(seed ^ 0x5eed0f1a17e57a7eULL));
}

}  // namespace popproto

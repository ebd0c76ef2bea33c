#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace combwalk {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Derive the seed of replica `index` from a master seed.
 *
 * Computes mix64(master + (index + 1) * 0x9e3779b97f4a7c15). The golden-ratio
 * increment is odd, so the map is injective in `index` for a fixed master, and
 * it uses only 64-bit wrapping arithmetic, so it is identical on every
 * platform.
 */
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

/// FNV-1a over bytes; used for configuration fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/**
 * A seeded random stream.
 *
 * The engine is std::mt19937_64, whose output sequence for a given seed is
 * fixed by the C++ standard. Bounded integers use Lemire's multiply-shift with
 * rejection, and uniform reals use the top 53 bits, so no
 * implementation-defined distribution objects are involved.
 */
class RngStream {
 public:
  static constexpr std::string_view algorithm_id = "mt19937_64";

  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Independent child stream, e.g. one per walker of a replica.
  RngStream split(std::uint64_t child) const { return RngStream(derive_seed(seed_, child)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace combwalk

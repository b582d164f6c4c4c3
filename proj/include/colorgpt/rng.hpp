#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace colorgpt {

/// 64-bit FNV-1a. Used for fingerprints, feature hashing and seed derivation,
/// so its output must never change.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combines a global seed with a string key and an integer, e.g.
/// (seed, document id, mask count).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key,
                                 std::uint64_t extra = 0) {
  return splitmix64(splitmix64(seed) ^ fnv1a64(key) ^ splitmix64(extra + 1));
}

/// Engine plus portable draws. std::mt19937_64 output is fixed by the
/// standard; the distributions in <random> are not, so draws are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform real in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace colorgpt

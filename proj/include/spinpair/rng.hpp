#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace spinpair {

/// Deterministic random stream. Normal variates are produced by an explicit
/// Box-Muller transform over 53-bit uniforms so that byte-identical output does
/// not depend on the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) { reseed(seed); }

  void reseed(uint64_t seed) {
    // splitmix64 expansion into a seed sequence, the usual cure for the
    // low-entropy single-word seeding of mt19937_64
    uint64_t s = seed;
    std::seed_seq seq{next_split(s), next_split(s), next_split(s), next_split(s)};
    engine_.seed(seq);
    have_spare_ = false;
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1], safe as a log argument.
  double uniform_pos() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal variate.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  uint64_t raw() { return engine_(); }

 private:
  static uint64_t next_split(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// FNV-1a, used for label hashing and config fingerprints.
inline uint64_t fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Derives the seed for one shot of one measurement cell from the master seed.
inline uint64_t shot_seed(uint64_t master, std::string_view cell, uint64_t shot_index) {
  uint64_t h = fnv1a(cell, master ^ 0x9e3779b97f4a7c15ull);
  h ^= shot_index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  // final splitmix64 mix
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

}  // namespace spinpair

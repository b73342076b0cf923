// Deterministic pseudo-random generation used throughout the library.
//
// A single fixed generator (xoshiro256++ seeded through splitmix64) keeps
// every sampling path reproducible across platforms and standard-library
// versions; std::mt19937 distributions are implementation-defined and would
// break byte-identical experiment reruns.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace prf {

// splitmix64: seed expander and mixing hash.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// xoshiro256++ by Blackman & Vigna (public domain reference implementation).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. No spare caching: two uniforms are
  // consumed per draw so the stream position is input-independent.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) %
           (n ? n : 1);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

// Stable per-(realization, solver) seed derivation from a master seed, so
// solver sets can be compared on identical channel draws (paired design).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t realization,
                                 std::uint64_t solver_id) {
  SplitMix64 a(master);
  SplitMix64 b(a.next() ^ (0x9e3779b97f4a7c15ULL * (realization + 1)));
  SplitMix64 c(b.next() ^ (0xbf58476d1ce4e5b9ULL * (solver_id + 1)));
  return c.next();
}

}  // namespace prf

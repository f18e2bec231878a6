// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "mfrf/common.hpp"

namespace mfrf {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable, splittable generator (xoshiro256++ seeded via splitmix64).
/// Substreams are derived from the root seed only, so consuming draws from
/// a parent never changes what a substream produces.
class Rng {
public:
  explicit Rng(uint64_t seed) : root_(seed) {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }

  /// Circularly symmetric complex normal CN(0, variance).
  cxd cnormal(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    return {s * normal(), s * normal()};
  }

  uint64_t root() const { return root_; }

  /// Independent substream addressed by tag; derived from the root seed.
  Rng substream(uint64_t tag) const {
    uint64_t sm = root_ ^ (tag * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL);
    return Rng(splitmix64(sm));
  }

  Rng substream(uint64_t tag_a, uint64_t tag_b) const {
    return substream(tag_a).substream(tag_b);
  }

private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t root_;
  std::array<uint64_t, 4> state_{};
};

}  // namespace mfrf

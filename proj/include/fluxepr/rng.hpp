#pragma once

#include <cmath>
#include <cstdint>

// Deterministic random numbers for the Monte Carlo readout simulation.
//
// The generator is xoshiro256** 1.0 (Blackman & Vigna), seeded through
// splitmix64. Both algorithms are public, fixed-point-free integer code, so
// any language can reproduce the streams bit for bit. The mappings are part
// of the contract:
//   uniform double in [0,1):  (next() >> 11) * 2^-53
//   Bernoulli(p):             uniform() < p
//   standard normal:          Box-Muller on two consecutive uniforms,
//                             z = sqrt(-2 ln(1-u1)) * cos(2 pi u2)
//   substream(seed, a, b):    splitmix64 chain over (seed, a, b), see below
namespace fluxepr {

inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t state_[4];
};

// Derives an independent stream for a (grid point, batch) pair so parallel
// evaluation order cannot change results. The derived seed is the third
// output of a splitmix64 chain whose state is advanced by seed, then a+1,
// then b+1 (the +1 keeps index 0 from collapsing onto the bare seed).
inline uint64_t substream_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  uint64_t sm = seed;
  splitmix64_next(sm);
  sm ^= (a + 1) * 0xD1342543DE82EF95ULL;
  splitmix64_next(sm);
  sm ^= (b + 1) * 0xDA942042E4DD58B5ULL;
  return splitmix64_next(sm);
}

}  // namespace fluxepr

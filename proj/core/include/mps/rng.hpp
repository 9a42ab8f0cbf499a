#pragma once

#include <cmath>
#include <cstdint>

namespace mps {

// One step of splitmix64; used to expand (seed, replicate) into stream state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream keyed by (seed, replicate, stream).
//
// Every replicate owns an independent stream, so ensemble generation is
// order- and thread-count-independent. The generator is xoshiro256++ with
// splitmix64 state expansion; normal variates use Box-Muller so the byte
// stream does not depend on the standard library implementation.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t replicate = 0, std::uint64_t stream = 0) {
    std::uint64_t key = seed;
    (void)splitmix64(key);
    key ^= 0x6a09e667f3bcc909ULL ^ replicate;
    (void)splitmix64(key);
    key ^= 0xbb67ae8584caa73bULL ^ stream;
    for (auto& word : state_) word = splitmix64(key);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Rademacher sign in {-1, +1}.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // Exact Poisson count (Knuth product method; fine for desk-scale rates).
  std::uint64_t poisson(double lambda) {
    const double limit = std::exp(-lambda);
    std::uint64_t count = 0;
    double product = uniform01();
    while (product > limit) {
      ++count;
      product *= uniform01();
    }
    return count;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mps

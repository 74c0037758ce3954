#pragma once

#include <cmath>
#include <cstdint>

namespace condmc {

namespace detail {

// splitmix64 finalizer; used both as a mixer and to expand seeds.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t rotl64(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

// xoshiro256++ stream. Streams are derived from a master seed plus up to
// three entity indices (lane, path, branch), so ensembles are reproducible
// under any thread schedule.
class StreamRng {
 public:
  explicit StreamRng(uint64_t seed) {
    uint64_t z = seed;
    for (auto& word : s_) {
      z = detail::mix64(z);
      word = z;
    }
    // xoshiro state must not be all-zero; mix64 output of anything is
    // never four zero words in a row, but keep the guard explicit.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;
  }

  uint64_t next_u64() {
    const uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl64(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unit-rate exponential. uniform() < 1 so the log argument is in (0, 1].
  double exponential() { return -std::log1p(-uniform()); }

 private:
  uint64_t s_[4];
};

// Deterministic stream derivation: identical SeedSpec and indices give a
// bit-identical stream, independent of thread count or call order.
struct SeedSpec {
  uint64_t master = 0;

  uint64_t derive(uint64_t lane, uint64_t a = 0, uint64_t b = 0) const {
    uint64_t z = detail::mix64(master ^ 0x6a09e667f3bcc909ULL);
    z = detail::mix64(z ^ lane);
    z = detail::mix64(z ^ a);
    z = detail::mix64(z ^ b);
    return z;
  }

  StreamRng stream(uint64_t lane, uint64_t a = 0, uint64_t b = 0) const {
    return StreamRng(derive(lane, a, b));
  }
};

// Lane constants keep independent consumers of one master seed apart.
namespace lanes {
inline constexpr uint64_t kClassical = 0x01;
inline constexpr uint64_t kTrunk = 0x02;
inline constexpr uint64_t kBranch = 0x03;
inline constexpr uint64_t kPilot = 0x04;
inline constexpr uint64_t kExperiment = 0x05;
inline constexpr uint64_t kReference = 0x06;
inline constexpr uint64_t kSubsample = 0x07;
}  // namespace lanes

}  // namespace condmc

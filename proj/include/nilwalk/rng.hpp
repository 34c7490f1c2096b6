#pragma once

#include <cmath>
#include <cstdint>

namespace nilwalk {

/// Counter-based stream: state is derived from (seed, stream index) alone,
/// so sample i is the same no matter how work is scheduled across threads.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) {
    state_ = mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull));
    if (state_ == 0) state_ = 0x106689d45497fdb5ull;
  }

  uint64_t next_u64() {
    // splitmix64 step
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (consumes two uniforms).
  double next_normal() {
    double u1 = next_uniform(), u2 = next_uniform();
    while (u1 <= 0.0) u1 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    return z ^ (z >> 33);
  }
  uint64_t state_;
};

}  // namespace nilwalk

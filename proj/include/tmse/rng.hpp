#pragma once

#include <cmath>
#include <cstdint>

#include "tmse/tensor.hpp"

namespace tmse {

struct RngSeed {
  uint64_t seed = 0;
  uint64_t stream = 0;
};

// PCG32 (Melissa O'Neill's pcg32_random_r). Explicit seed + stream id so
// workers can derive independent, reproducible sequences. Same (seed,
// stream, call sequence) always yields the same draws, on every platform.
class Pcg32 {
 public:
  Pcg32() : Pcg32(0, 0) {}
  Pcg32(uint64_t seed, uint64_t stream) { reseed(seed, stream); }
  explicit Pcg32(const RngSeed& s) : Pcg32(s.seed, s.stream) {}

  void reseed(uint64_t seed, uint64_t stream) {
    state_ = 0u;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
    have_spare_ = false;
  }

  uint32_t next_u32() {
    uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
  }

  uint64_t next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // uniform in [0, 1), 53-bit resolution
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // standard normal via Box-Muller; spare value cached for the next call
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so log() is finite
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  void fill_normal(Tensor& t) {
    for (int64_t i = 0; i < t.size(); ++i) t[i] = next_normal();
  }

  Tensor normal_tensor(std::vector<int> shape) {
    Tensor t(std::move(shape));
    fill_normal(t);
    return t;
  }

 private:
  uint64_t state_ = 0;
  uint64_t inc_ = 1;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace tmse

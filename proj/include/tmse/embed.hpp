#pragma once

#include <cstdint>
#include <vector>

#include "tmse/tensor.hpp"

namespace tmse {

// Fixed random Fourier projection of the scalar timestep. Frequencies are
// drawn once from N(0, scale^2) under the given seed, so the mapping is
// deterministic and shared between runs.
struct FourierFeatures {
  int dim = 128;         // output length, even
  double scale = 16.0;
  std::vector<double> freqs;  // dim/2 entries

  FourierFeatures() = default;
  FourierFeatures(int dim, double scale, uint64_t seed);

  Tensor at(double t) const;  // [sin(2*pi*f_i*t)..., cos(2*pi*f_i*t)...]
};

struct TimestepEmbedConfig {
  int dim = 128;
  double fourier_scale = 16.0;
  uint64_t seed = 7;
};

// Fourier features followed by a seeded linear layer + SiLU. Deterministic
// given (t, cfg); trainable conditioning paths in the predictors run the
// linear part on the tape instead.
struct TimestepEmbedding {
  TimestepEmbedConfig cfg;
  FourierFeatures fourier;
  Tensor w;  // (dim, dim)
  Tensor b;  // (dim)

  explicit TimestepEmbedding(const TimestepEmbedConfig& cfg);
};

Tensor timestep_embed(double t, const TimestepEmbedding& emb);

}  // namespace tmse

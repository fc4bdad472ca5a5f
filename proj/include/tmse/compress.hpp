#pragma once

#include "tmse/stft.hpp"
#include "tmse/tensor.hpp"

namespace tmse {

// Element-wise magnitude compression |y| -> scale_b * |y|^exponent_a with
// phase preserved. Defaults are the usual alpha=0.5, beta=0.33.
struct CompressionParams {
  double exponent_a = 0.5;
  double scale_b = 0.33;

  void validate() const {
    if (!(exponent_a > 0.0 && exponent_a <= 1.0))
      throw std::invalid_argument("CompressionParams: exponent_a must be in (0,1]");
    if (!(scale_b > 0.0)) throw std::invalid_argument("CompressionParams: scale_b must be > 0");
  }
};

// Compressed spectrogram as a real (2, F, K) tensor: channel 0 real part,
// channel 1 imaginary part.
struct CompressedSpec {
  Tensor values;  // (2, F, K)
  CompressionParams params;
  StftConfig stft_cfg;

  int n_freq() const { return values.dim(1); }
  int n_frames() const { return values.dim(2); }
};

CompressedSpec compress(const ComplexSpectrogram& spec, const CompressionParams& p);
ComplexSpectrogram decompress(const CompressedSpec& cspec);

// Tensor-level helpers used by the sampler/training pipeline, which move
// (2, F, K) tensors around without the wrapper struct.
Tensor compress_tensor(const Tensor& spec2fk, const CompressionParams& p);
Tensor decompress_tensor(const Tensor& spec2fk, const CompressionParams& p);

Tensor spectrogram_to_tensor(const ComplexSpectrogram& spec);
ComplexSpectrogram tensor_to_spectrogram(const Tensor& t, const StftConfig& cfg);

}  // namespace tmse

#pragma once

#include "tmse/compress.hpp"
#include "tmse/path.hpp"
#include "tmse/predictor.hpp"
#include "tmse/sampler.hpp"
#include "tmse/wav_io.hpp"

namespace tmse {

// noisy wav -> stft -> compress -> Euler solve -> decompress -> istft,
// length-matched to the input.
Waveform enhance_waveform(const Waveform& noisy, TargetPredictor& predictor,
                          const ProbabilityPath& path, const SamplerConfig& sampler,
                          const StftConfig& stft_cfg, const CompressionParams& comp);

// Compressed-domain view of a waveform (the sampler's x1).
Tensor waveform_to_compressed(const Waveform& wav, const StftConfig& stft_cfg,
                              const CompressionParams& comp);

Waveform compressed_to_waveform(const Tensor& spec, const StftConfig& stft_cfg,
                                const CompressionParams& comp, int64_t out_len, int sample_rate);

}  // namespace tmse

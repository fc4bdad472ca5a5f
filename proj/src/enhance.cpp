#include "tmse/enhance.hpp"

namespace tmse {

Tensor waveform_to_compressed(const Waveform& wav, const StftConfig& stft_cfg,
                              const CompressionParams& comp) {
  return compress_tensor(spectrogram_to_tensor(stft(wav, stft_cfg)), comp);
}

Waveform compressed_to_waveform(const Tensor& spec, const StftConfig& stft_cfg,
                                const CompressionParams& comp, int64_t out_len, int sample_rate) {
  ComplexSpectrogram cs = tensor_to_spectrogram(decompress_tensor(spec, comp), stft_cfg);
  Waveform out = istft(cs, stft_cfg, out_len);
  out.sample_rate = sample_rate;
  return out;
}

Waveform enhance_waveform(const Waveform& noisy, TargetPredictor& predictor,
                          const ProbabilityPath& path, const SamplerConfig& sampler,
                          const StftConfig& stft_cfg, const CompressionParams& comp) {
  const Tensor x1 = waveform_to_compressed(noisy, stft_cfg, comp);
  const EulerResult res = euler_solve(path, predictor, x1, sampler);
  return compressed_to_waveform(res.x0_hat, stft_cfg, comp,
                                static_cast<int64_t>(noisy.samples.size()), noisy.sample_rate);
}

}  // namespace tmse

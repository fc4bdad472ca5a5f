#pragma once

#include <vector>

#include "tmse/mel.hpp"
#include "tmse/stft.hpp"
#include "tmse/tensor.hpp"
#include "tmse/wav_io.hpp"

namespace tmse {

// Mean squared error over all elements; the target-matching objective when
// applied to (x0_hat, x0) and the flow-matching one on (u_hat, u).
double tm_loss(const Tensor& a, const Tensor& b);
double tm_loss(const ComplexSpectrogram& a, const ComplexSpectrogram& b);
double fm_loss(const Tensor& u_hat, const Tensor& u_target);

struct MelScale {
  int frame_size;
  int n_mels;
};

// Per scale: fft = frame, hop = frame/4, f_max = Nyquist. Defaults carry the
// full listed ladder.
struct MelLossConfig {
  std::vector<MelScale> scales = {{32, 5},    {64, 10},   {128, 20}, {256, 40},
                                  {512, 80},  {1024, 160}, {2048, 210}};
  StftConfig scale_stft(int idx) const;
};

// Sum over scales of the mean absolute difference between mel magnitudes,
// each scale normalized by (frames x mel bands).
double multiscale_mel_loss(const Waveform& wav_hat, const Waveform& wav_ref,
                           const MelLossConfig& cfg);

constexpr double kSiSdrEps = 1e-8;
constexpr double kSiSdrCapDb = 60.0;

// Scale-invariant SDR in dB: project est onto ref, compare target vs
// residual energy. Capped at +60 dB.
double si_sdr(const Waveform& est, const Waveform& ref);
inline double sisdr_loss(const Waveform& est, const Waveform& ref) { return -si_sdr(est, ref); }

// Plain (non-invariant) SNR of est against ref.
double plain_snr(const Waveform& est, const Waveform& ref);

struct CompositeWeights {
  double lambda_mel = 0.1;
  double lambda_sisnr = 0.01;
};

struct LossBreakdown {
  double tm = 0;
  double mel = 0;
  double sisnr = 0;
  double total = 0;
};

LossBreakdown composite_loss(const Tensor& x0_hat_spec, const Tensor& x0_spec,
                             const Waveform& wav_hat, const Waveform& wav_ref,
                             const CompositeWeights& w, const MelLossConfig& melcfg);

}  // namespace tmse

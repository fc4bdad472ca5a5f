#include "tmse/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace tmse {

double tm_loss(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "tm_loss");
  double s = 0;
  for (int64_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double tm_loss(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  if (a.n_freq != b.n_freq || a.n_frames != b.n_frames)
    throw std::invalid_argument("tm_loss: spectrogram shape mismatch");
  double s = 0;
  for (size_t i = 0; i < a.v.size(); ++i) s += std::norm(a.v[i] - b.v[i]);
  return s / static_cast<double>(a.v.size());
}

double fm_loss(const Tensor& u_hat, const Tensor& u_target) { return tm_loss(u_hat, u_target); }

StftConfig MelLossConfig::scale_stft(int idx) const {
  const MelScale& s = scales[static_cast<size_t>(idx)];
  StftConfig cfg;
  cfg.window_len = s.frame_size;
  cfg.fft_len = s.frame_size;
  cfg.hop = std::max(1, s.frame_size / 4);
  cfg.window = "sqrt_hann";
  cfg.center_pad = true;
  return cfg;
}

double multiscale_mel_loss(const Waveform& wav_hat, const Waveform& wav_ref,
                           const MelLossConfig& cfg) {
  if (wav_hat.samples.size() != wav_ref.samples.size())
    throw std::invalid_argument("multiscale_mel_loss: length mismatch");
  if (wav_hat.sample_rate != wav_ref.sample_rate)
    throw std::invalid_argument("multiscale_mel_loss: sample rate mismatch");
  if (cfg.scales.empty()) throw std::invalid_argument("multiscale_mel_loss: no scales");

  const double nyquist = wav_ref.sample_rate / 2.0;
  double total = 0;
  for (size_t j = 0; j < cfg.scales.size(); ++j) {
    const StftConfig scfg = cfg.scale_stft(static_cast<int>(j));
    const MelFilterbank fb = build_mel_filterbank(scfg.n_freq(), cfg.scales[j].n_mels,
                                                  wav_ref.sample_rate, nyquist);
    const ComplexSpectrogram sh = stft(wav_hat, scfg);
    const ComplexSpectrogram sr = stft(wav_ref, scfg);

    const int f = sh.n_freq, k = sh.n_frames;
    std::vector<double> mh(static_cast<size_t>(f) * k), mr(static_cast<size_t>(f) * k);
    for (size_t i = 0; i < sh.v.size(); ++i) {
      mh[i] = std::abs(sh.v[i]);
      mr[i] = std::abs(sr.v[i]);
    }
    const std::vector<double> melh = apply_mel(mh, f, k, fb);
    const std::vector<double> melr = apply_mel(mr, f, k, fb);

    double s = 0;
    for (size_t i = 0; i < melh.size(); ++i) s += std::fabs(melh[i] - melr[i]);
    total += s / static_cast<double>(melh.size());
  }
  return total;
}

double si_sdr(const Waveform& est, const Waveform& ref) {
  if (est.samples.size() != ref.samples.size())
    throw std::invalid_argument("si_sdr: length mismatch");
  double dot = 0, ref2 = 0;
  for (size_t i = 0; i < ref.samples.size(); ++i) {
    dot += est.samples[i] * ref.samples[i];
    ref2 += ref.samples[i] * ref.samples[i];
  }
  if (ref2 == 0.0) throw std::invalid_argument("si_sdr: all-zero reference");
  const double a = dot / (ref2 + kSiSdrEps);
  double target2 = 0, err2 = 0;
  for (size_t i = 0; i < ref.samples.size(); ++i) {
    const double s = a * ref.samples[i];
    const double e = est.samples[i] - s;
    target2 += s * s;
    err2 += e * e;
  }
  const double db = 10.0 * std::log10(target2 / (err2 + kSiSdrEps));
  return std::min(db, kSiSdrCapDb);
}

double plain_snr(const Waveform& est, const Waveform& ref) {
  if (est.samples.size() != ref.samples.size())
    throw std::invalid_argument("plain_snr: length mismatch");
  double ref2 = 0, err2 = 0;
  for (size_t i = 0; i < ref.samples.size(); ++i) {
    const double e = est.samples[i] - ref.samples[i];
    ref2 += ref.samples[i] * ref.samples[i];
    err2 += e * e;
  }
  if (ref2 == 0.0) throw std::invalid_argument("plain_snr: all-zero reference");
  return std::min(10.0 * std::log10(ref2 / (err2 + kSiSdrEps)), kSiSdrCapDb);
}

LossBreakdown composite_loss(const Tensor& x0_hat_spec, const Tensor& x0_spec,
                             const Waveform& wav_hat, const Waveform& wav_ref,
                             const CompositeWeights& w, const MelLossConfig& melcfg) {
  LossBreakdown lb;
  lb.tm = tm_loss(x0_hat_spec, x0_spec);
  lb.mel = w.lambda_mel != 0.0 ? multiscale_mel_loss(wav_hat, wav_ref, melcfg) : 0.0;
  lb.sisnr = w.lambda_sisnr != 0.0 ? sisdr_loss(wav_hat, wav_ref) : 0.0;
  lb.total = lb.tm + w.lambda_mel * lb.mel + w.lambda_sisnr * lb.sisnr;
  return lb;
}

}  // namespace tmse

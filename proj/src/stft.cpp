#include "tmse/stft.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tmse/fft.hpp"

namespace tmse {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEnvelopeFloor = 1e-12;
}  // namespace

void StftConfig::validate() const {
  if (hop <= 0 || hop > window_len)
    throw std::invalid_argument("StftConfig: need 0 < hop <= window_len");
  if (fft_len < window_len) throw std::invalid_argument("StftConfig: fft_len < window_len");
  if (fft_len % 2 != 0) throw std::invalid_argument("StftConfig: fft_len must be even");
  if (window != "sqrt_hann" && window != "hann" && window != "rect")
    throw std::invalid_argument("StftConfig: unknown window '" + window + "'");
}

std::vector<double> build_window(const StftConfig& cfg) {
  const int n = cfg.window_len;
  std::vector<double> w(static_cast<size_t>(n), 1.0);
  if (cfg.window == "rect") return w;
  for (int i = 0; i < n; ++i) {
    double h = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));  // periodic Hann
    w[static_cast<size_t>(i)] = (cfg.window == "sqrt_hann") ? std::sqrt(h) : h;
  }
  return w;
}

int stft_frame_count(int64_t n_samples, const StftConfig& cfg) {
  if (n_samples < 1) throw std::invalid_argument("stft: empty input");
  if (cfg.center_pad) return static_cast<int>(n_samples / cfg.hop) + 1;
  int64_t k = (n_samples - cfg.window_len) / cfg.hop + 1;
  if (k < 1) throw std::invalid_argument("stft: input shorter than window (center_pad off)");
  return static_cast<int>(k);
}

ComplexSpectrogram stft(const Waveform& wave, const StftConfig& cfg) {
  cfg.validate();
  const int64_t n = static_cast<int64_t>(wave.samples.size());
  const int k_frames = stft_frame_count(n, cfg);
  const int pad = cfg.center_pad ? cfg.fft_len / 2 : 0;
  const int win = cfg.window_len;
  const std::vector<double> w = build_window(cfg);

  const int64_t padded_len =
      std::max<int64_t>(n + 2 * pad, static_cast<int64_t>(k_frames - 1) * cfg.hop + win);
  std::vector<double> padded(static_cast<size_t>(padded_len), 0.0);
  for (int64_t i = 0; i < n; ++i) padded[static_cast<size_t>(i + pad)] = wave.samples[static_cast<size_t>(i)];

  ComplexSpectrogram out;
  out.cfg = cfg;
  out.n_freq = cfg.n_freq();
  out.n_frames = k_frames;
  out.v.assign(static_cast<size_t>(out.n_freq) * k_frames, {0.0, 0.0});

  std::vector<double> frame(static_cast<size_t>(cfg.fft_len), 0.0);
  for (int k = 0; k < k_frames; ++k) {
    const int64_t start = static_cast<int64_t>(k) * cfg.hop;
    for (int i = 0; i < win; ++i)
      frame[static_cast<size_t>(i)] = padded[static_cast<size_t>(start + i)] * w[static_cast<size_t>(i)];
    for (int i = win; i < cfg.fft_len; ++i) frame[static_cast<size_t>(i)] = 0.0;
    auto bins = fft::rdft_onesided(frame.data(), cfg.fft_len);
    for (int f = 0; f < out.n_freq; ++f) out.at(f, k) = bins[static_cast<size_t>(f)];
  }
  return out;
}

Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg, int64_t out_len) {
  cfg.validate();
  if (spec.n_freq != cfg.n_freq())
    throw std::invalid_argument("istft: spectrogram bins do not match config fft_len");
  if (spec.n_frames < 1) throw std::invalid_argument("istft: empty spectrogram");
  if (out_len == 0) out_len = static_cast<int64_t>(spec.n_frames) * cfg.hop;

  const int pad = cfg.center_pad ? cfg.fft_len / 2 : 0;
  const int win = cfg.window_len;
  const std::vector<double> w = build_window(cfg);

  const int64_t full_len = static_cast<int64_t>(spec.n_frames - 1) * cfg.hop + win;
  std::vector<double> acc(static_cast<size_t>(full_len), 0.0);
  std::vector<double> env(static_cast<size_t>(full_len), 0.0);

  std::vector<std::complex<double>> col(static_cast<size_t>(spec.n_freq));
  for (int k = 0; k < spec.n_frames; ++k) {
    for (int f = 0; f < spec.n_freq; ++f) col[static_cast<size_t>(f)] = spec.at(f, k);
    auto frame = fft::irdft_onesided(col.data(), cfg.fft_len);
    const int64_t start = static_cast<int64_t>(k) * cfg.hop;
    for (int i = 0; i < win; ++i) {
      acc[static_cast<size_t>(start + i)] += w[static_cast<size_t>(i)] * frame[static_cast<size_t>(i)];
      env[static_cast<size_t>(start + i)] += w[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
    }
  }

  Waveform out;
  out.sample_rate = 16000;
  out.samples.assign(static_cast<size_t>(out_len), 0.0);
  for (int64_t i = 0; i < out_len; ++i) {
    const int64_t p = i + pad;
    if (p < full_len && env[static_cast<size_t>(p)] > kEnvelopeFloor)
      out.samples[static_cast<size_t>(i)] = acc[static_cast<size_t>(p)] / env[static_cast<size_t>(p)];
  }
  return out;
}

double overlap_envelope_ripple(const StftConfig& cfg) {
  cfg.validate();
  const std::vector<double> w = build_window(cfg);
  const int win = cfg.window_len;
  const int n_frames = 64;
  const int len = (n_frames - 1) * cfg.hop + win;
  std::vector<double> env(static_cast<size_t>(len), 0.0);
  for (int k = 0; k < n_frames; ++k)
    for (int i = 0; i < win; ++i)
      env[static_cast<size_t>(k * cfg.hop + i)] += w[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
  // interior: positions covered by the full overlap depth
  double mn = 1e300, mx = -1e300, mean = 0;
  int count = 0;
  for (int i = win; i < len - win; ++i) {
    double e = env[static_cast<size_t>(i)];
    mn = std::min(mn, e);
    mx = std::max(mx, e);
    mean += e;
    ++count;
  }
  mean /= count;
  return std::max(mx - mean, mean - mn) / mean;
}

}  // namespace tmse

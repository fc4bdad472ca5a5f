#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tmse/wav_io.hpp"

namespace tmse {

// Analysis/synthesis configuration. Defaults follow the 16 kHz setup used
// throughout: 510-sample window, hop 128, centered frames, so the one-sided
// spectrum has 256 bins.
struct StftConfig {
  int window_len = 510;
  int hop = 128;
  int fft_len = 510;
  std::string window = "sqrt_hann";  // "sqrt_hann" | "hann" | "rect"
  bool center_pad = true;

  int n_freq() const { return fft_len / 2 + 1; }
  void validate() const;
};

struct ComplexSpectrogram {
  int n_freq = 0;
  int n_frames = 0;
  std::vector<std::complex<double>> v;  // row-major, [f * n_frames + k]
  StftConfig cfg;

  std::complex<double>& at(int f, int k) { return v[static_cast<size_t>(f) * n_frames + k]; }
  std::complex<double> at(int f, int k) const { return v[static_cast<size_t>(f) * n_frames + k]; }
};

// Periodic taper of the configured kind, window_len points.
std::vector<double> build_window(const StftConfig& cfg);

// Frame count for a signal of the given length under cfg.
int stft_frame_count(int64_t n_samples, const StftConfig& cfg);

ComplexSpectrogram stft(const Waveform& wave, const StftConfig& cfg);

// Inverse with synthesis windowing and overlap-sum normalization; exact
// reconstruction whenever the window overlap envelope is nonzero.
// out_len == 0 means n_frames * hop.
Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg, int64_t out_len = 0);

// Max deviation of the analysis*synthesis overlap envelope from constant,
// relative to its mean, over the interior. Diagnostic for window/hop choices.
double overlap_envelope_ripple(const StftConfig& cfg);

}  // namespace tmse

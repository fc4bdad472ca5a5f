#include "tmse/mel.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tmse {

namespace {
// Slaney constants: 200/3 Hz per mel below the 1 kHz break, log spacing above.
constexpr double kFSp = 200.0 / 3.0;
constexpr double kBreakHz = 1000.0;
constexpr double kBreakMel = kBreakHz / kFSp;  // 15.0
const double kLogStep = std::log(6.4) / 27.0;
}  // namespace

double hz_to_mel(double hz) {
  if (hz <= kBreakHz) return hz / kFSp;
  return kBreakMel + std::log(hz / kBreakHz) / kLogStep;
}

double mel_to_hz(double mel) {
  if (mel <= kBreakMel) return mel * kFSp;
  return kBreakHz * std::exp(kLogStep * (mel - kBreakMel));
}

MelFilterbank build_mel_filterbank(int n_freq, int n_mels, double fs, double f_max) {
  if (n_mels < 1 || n_freq < 2) throw std::invalid_argument("mel: need n_mels >= 1, n_freq >= 2");
  if (n_mels >= n_freq) throw std::invalid_argument("mel: n_mels must be < n_freq");
  if (f_max > fs / 2 + 1e-9) throw std::invalid_argument("mel: f_max above Nyquist");
  if (f_max <= 0 || fs <= 0) throw std::invalid_argument("mel: fs and f_max must be positive");

  MelFilterbank fb;
  fb.n_freq = n_freq;
  fb.n_mels = n_mels;
  fb.fs = fs;
  fb.f_max = f_max;
  fb.weights.assign(static_cast<size_t>(n_freq) * n_mels, 0.0);

  // band edges: n_mels + 2 points uniform in mel over [0, f_max]
  std::vector<double> edges_hz(static_cast<size_t>(n_mels) + 2);
  const double mel_max = hz_to_mel(f_max);
  for (int i = 0; i < n_mels + 2; ++i)
    edges_hz[static_cast<size_t>(i)] = mel_to_hz(mel_max * i / (n_mels + 1));

  // bin center frequencies; fft_len = 2 * (n_freq - 1)
  const double bin_hz = fs / (2.0 * (n_freq - 1));

  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges_hz[static_cast<size_t>(m)];
    const double mid = edges_hz[static_cast<size_t>(m) + 1];
    const double hi = edges_hz[static_cast<size_t>(m) + 2];
    if (mid - lo <= 0 || hi - mid <= 0)
      throw std::runtime_error("mel: degenerate band edges at filter " + std::to_string(m));
    bool nonzero = false;
    for (int f = 0; f < n_freq; ++f) {
      const double fhz = f * bin_hz;
      double wgt = std::min((fhz - lo) / (mid - lo), (hi - fhz) / (hi - mid));
      if (wgt > 0) {
        fb.weights[static_cast<size_t>(f) * n_mels + m] = wgt;
        nonzero = true;
      }
    }
    if (!nonzero)
      throw std::runtime_error("mel: filter " + std::to_string(m) +
                               " collapses between frequency bins");
  }
  return fb;
}

std::vector<double> apply_mel(const std::vector<double>& mag, int n_freq, int n_frames,
                              const MelFilterbank& fb) {
  if (n_freq != fb.n_freq) throw std::invalid_argument("apply_mel: frequency bins mismatch");
  if (mag.size() != static_cast<size_t>(n_freq) * n_frames)
    throw std::invalid_argument("apply_mel: magnitude buffer size mismatch");
  std::vector<double> out(static_cast<size_t>(fb.n_mels) * n_frames, 0.0);
  for (int f = 0; f < n_freq; ++f)
    for (int m = 0; m < fb.n_mels; ++m) {
      const double w = fb.at(f, m);
      if (w == 0.0) continue;
      for (int k = 0; k < n_frames; ++k)
        out[static_cast<size_t>(m) * n_frames + k] += w * mag[static_cast<size_t>(f) * n_frames + k];
    }
  return out;
}

void export_mel_csv(const MelFilterbank& fb, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("export_mel_csv: cannot open " + path);
  for (int i = 0; i < fb.n_freq; ++i) {
    for (int m = 0; m < fb.n_mels; ++m) {
      if (m) f << ",";
      f << fb.at(i, m);
    }
    f << "\n";
  }
}

}  // namespace tmse

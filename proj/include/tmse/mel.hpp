#pragma once

#include <string>
#include <vector>

namespace tmse {

// Triangular filterbank on the Slaney mel scale (linear below 1 kHz, log
// above), unit peak per filter. weights is F x F_mel, row-major.
struct MelFilterbank {
  int n_freq = 0;
  int n_mels = 0;
  std::vector<double> weights;  // [f * n_mels + m]
  double fs = 16000;
  double f_max = 8000;

  double at(int f, int m) const { return weights[static_cast<size_t>(f) * n_mels + m]; }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

MelFilterbank build_mel_filterbank(int n_freq, int n_mels, double fs, double f_max);

// mag is F x K row-major magnitudes; result is F_mel x K.
std::vector<double> apply_mel(const std::vector<double>& mag, int n_freq, int n_frames,
                              const MelFilterbank& fb);

// One row per frequency bin, one column per mel band.
void export_mel_csv(const MelFilterbank& fb, const std::string& path);

}  // namespace tmse

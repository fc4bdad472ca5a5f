#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmse/wav_io.hpp"

namespace tmse {

// Deterministic paired (clean, noisy) generation: clean is a small sum of
// AM-modulated harmonics, noise is white or pink, scaled to hit the drawn
// per-utterance SNR exactly. snr >= kInfiniteSnr means zero noise.
struct SynthSpec {
  int n_utts = 64;
  double duration_s = 2.0;
  int sample_rate = 16000;
  int min_harmonics = 2;
  int max_harmonics = 5;
  std::string noise = "white";  // "white" | "pink"
  double snr_min_db = 0.0;
  double snr_max_db = 10.0;
  uint64_t seed = 1234;

  void validate() const;
};

constexpr double kInfiniteSnr = 1e9;

struct UttPair {
  Waveform clean;
  Waveform noisy;
  double snr_db = 0;
};

std::vector<UttPair> generate(const SynthSpec& spec);

// Writes pairs as clean/<name>.wav and noisy/<name>.wav under out_dir.
void dump_pairs(const std::vector<UttPair>& pairs, const std::string& out_dir);

}  // namespace tmse

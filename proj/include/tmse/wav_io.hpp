#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tmse {

// Time-domain signal. Samples nominally in [-1, 1]; sample_rate in Hz.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
};

enum class WavEncoding { Pcm16, Float32 };

// How multichannel files are folded down to mono.
enum class ChannelPolicy { First, Average };

// Reads a RIFF/WAVE file (16-bit PCM or 32-bit float only). Returns mono at
// the file's native rate; no resampling.
Waveform load_wav(const std::string& path, ChannelPolicy policy = ChannelPolicy::First);

// Writes mono WAV. Samples outside [-1, 1] are clipped; returns the clip count.
size_t save_wav(const Waveform& wave, const std::string& path,
                WavEncoding encoding = WavEncoding::Pcm16);

}  // namespace tmse

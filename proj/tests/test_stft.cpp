#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "tmse/rng.hpp"
#include "tmse/stft.hpp"

using namespace tmse;

namespace {

Waveform random_wave(int64_t n, uint64_t seed) {
  Pcg32 rng(seed, 0);
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(static_cast<size_t>(n));
  for (auto& s : w.samples) s = rng.next_normal() * 0.1;
  return w;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    num += d * d;
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("default config gives 256 bins and the documented frame count") {
  StftConfig cfg;
  CHECK(cfg.n_freq() == 256);
  CHECK(stft_frame_count(16000, cfg) == 126);  // floor(16000/128) + 1
  CHECK(stft_frame_count(32768, cfg) == 257);
  Waveform w = random_wave(16000, 5);
  ComplexSpectrogram s = stft(w, cfg);
  CHECK(s.n_freq == 256);
  CHECK(s.n_frames == 126);
}

TEST_CASE("zero waveform maps to an all-zero spectrogram and back") {
  StftConfig cfg;
  Waveform w;
  w.samples.assign(4096, 0.0);
  ComplexSpectrogram s = stft(w, cfg);
  for (const auto& v : s.v) CHECK(std::abs(v) == 0.0);
  Waveform r = istft(s, cfg, 4096);
  for (double x : r.samples) CHECK(x == 0.0);
}

TEST_CASE("istft(stft(x)) reconstructs random signals, several lengths") {
  StftConfig cfg;
  for (int64_t n : {1000ll, 16000ll, 65536ll}) {
    Waveform w = random_wave(n, static_cast<uint64_t>(n));
    ComplexSpectrogram s = stft(w, cfg);
    Waveform r = istft(s, cfg, n);
    REQUIRE(r.samples.size() == w.samples.size());
    CHECK(rel_l2(r.samples, w.samples) < 1e-6);
  }
}

TEST_CASE("istft default output length is n_frames * hop") {
  StftConfig cfg;
  Waveform w = random_wave(32640, 23);  // 256 frames
  ComplexSpectrogram s = stft(w, cfg);
  CHECK(s.n_frames == 256);
  Waveform r = istft(s, cfg);
  CHECK(r.samples.size() == 256u * 128u);  // 32768 ~ 2.048 s at 16 kHz
}

TEST_CASE("stft is linear") {
  StftConfig cfg;
  Waveform x = random_wave(8000, 1), y = random_wave(8000, 2);
  const double a = 1.7, b = -0.4;
  Waveform mix;
  mix.sample_rate = 16000;
  mix.samples.resize(x.samples.size());
  for (size_t i = 0; i < mix.samples.size(); ++i)
    mix.samples[i] = a * x.samples[i] + b * y.samples[i];
  ComplexSpectrogram sx = stft(x, cfg), sy = stft(y, cfg), sm = stft(mix, cfg);
  double max_err = 0, scale = 0;
  for (size_t i = 0; i < sm.v.size(); ++i) {
    max_err = std::max(max_err, std::abs(sm.v[i] - (a * sx.v[i] + b * sy.v[i])));
    scale = std::max(scale, std::abs(sm.v[i]));
  }
  CHECK(max_err < 1e-9 * scale);
}

TEST_CASE("pure sinusoid at a bin center peaks at that bin (direct DFT oracle)") {
  StftConfig cfg;
  const int fs = 16000;
  for (int bin : {16, 50, 120}) {
    const double freq = static_cast<double>(bin) * fs / cfg.fft_len;
    Waveform w;
    w.sample_rate = fs;
    w.samples.resize(8192);
    for (size_t i = 0; i < w.samples.size(); ++i)
      w.samples[i] = std::sin(2.0 * M_PI * freq * static_cast<double>(i) / fs);
    ComplexSpectrogram s = stft(w, cfg);

    // interior frames only
    for (int k = 8; k < s.n_frames - 8; k += 13) {
      int argmax = 0;
      double best = -1;
      for (int f = 0; f < s.n_freq; ++f)
        if (std::abs(s.at(f, k)) > best) {
          best = std::abs(s.at(f, k));
          argmax = f;
        }
      CHECK(argmax == bin);
    }

    // direct DFT of one windowed frame as an independent check
    const auto window = build_window(cfg);
    const int k = s.n_frames / 2;
    const int pad = cfg.fft_len / 2;
    std::complex<double> oracle(0, 0);
    for (int i = 0; i < cfg.window_len; ++i) {
      const int64_t idx = static_cast<int64_t>(k) * cfg.hop + i - pad;
      const double sample = (idx >= 0 && idx < static_cast<int64_t>(w.samples.size()))
                                ? w.samples[static_cast<size_t>(idx)]
                                : 0.0;
      const double ang = -2.0 * M_PI * bin * i / static_cast<double>(cfg.fft_len);
      oracle += sample * window[static_cast<size_t>(i)] *
                std::complex<double>(std::cos(ang), std::sin(ang));
    }
    CHECK(std::abs(s.at(bin, k) - oracle) < 1e-9 * std::abs(oracle));
  }
}

TEST_CASE("Parseval-style energy ratio is stable across random inputs") {
  StftConfig cfg;
  std::vector<double> ratios;
  for (uint64_t seed = 0; seed < 8; ++seed) {
    Waveform w = random_wave(32768, 100 + seed);
    ComplexSpectrogram s = stft(w, cfg);
    double spec_energy = 0;
    for (int f = 0; f < s.n_freq; ++f) {
      const double wgt = (f == 0 || f == s.n_freq - 1) ? 1.0 : 2.0;
      for (int k = 0; k < s.n_frames; ++k) spec_energy += wgt * std::norm(s.at(f, k));
    }
    double sig_energy = 0;
    for (double x : w.samples) sig_energy += x * x;
    ratios.push_back(spec_energy / sig_energy);
  }
  double mean = 0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  double var = 0;
  for (double r : ratios) var += (r - mean) * (r - mean);
  var /= static_cast<double>(ratios.size() - 1);
  CHECK(var / (mean * mean) < 1e-6);
}

TEST_CASE("the 510/128 sqrt-Hann pair needs overlap normalization") {
  // raw overlap-add is a few percent off constant at this window/hop pair;
  // the normalized inverse is what makes the round trip exact
  StftConfig cfg;
  CHECK(overlap_envelope_ripple(cfg) > 1e-6);
  StftConfig cfg512 = cfg;
  cfg512.window_len = 512;
  cfg512.fft_len = 512;
  CHECK(overlap_envelope_ripple(cfg512) < 1e-12);
}

TEST_CASE("istft rejects a spectrogram with the wrong bin count") {
  StftConfig cfg;
  ComplexSpectrogram s;
  s.n_freq = 128;
  s.n_frames = 4;
  s.v.assign(128 * 4, {0, 0});
  CHECK_THROWS(istft(s, cfg, 512));
}

TEST_CASE("invalid configs are rejected") {
  StftConfig bad;
  bad.hop = 0;
  CHECK_THROWS(bad.validate());
  bad = StftConfig{};
  bad.hop = 600;
  CHECK_THROWS(bad.validate());
  bad = StftConfig{};
  bad.window = "kaiser";
  CHECK_THROWS(bad.validate());
  Waveform empty;
  CHECK_THROWS(stft(empty, StftConfig{}));
}

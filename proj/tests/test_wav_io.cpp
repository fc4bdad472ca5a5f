#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "tmse/rng.hpp"
#include "tmse/wav_io.hpp"

using namespace tmse;

namespace {
std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("one second of 16 kHz mono PCM16 round trips header arithmetic") {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(16000, 0.0);
  const std::string path = tmp_path("tmse_zeros.wav");
  CHECK(save_wav(w, path) == 0);
  Waveform r = load_wav(path);
  CHECK(r.sample_rate == 16000);
  CHECK(r.samples.size() == 16000);
  for (double s : r.samples) CHECK(s == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("sine round trip stays inside the 16-bit quantization bound") {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(4096);
  for (size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = 0.7 * std::sin(2.0 * M_PI * 440.0 * static_cast<double>(i) / 16000.0);
  const std::string path = tmp_path("tmse_sine.wav");
  save_wav(w, path);
  Waveform r = load_wav(path);
  REQUIRE(r.samples.size() == w.samples.size());
  double max_err = 0;
  for (size_t i = 0; i < w.samples.size(); ++i)
    max_err = std::max(max_err, std::fabs(r.samples[i] - w.samples[i]));
  CHECK(max_err < std::pow(2.0, -15) + 1e-12);
  std::remove(path.c_str());
}

TEST_CASE("out-of-range samples clip to 1.0 and are counted") {
  Waveform w;
  w.sample_rate = 8000;
  w.samples = {1.5, -2.0, 0.25};
  const std::string path = tmp_path("tmse_clip.wav");
  CHECK(save_wav(w, path) == 2);
  Waveform r = load_wav(path);
  CHECK(r.samples[0] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-9));
  CHECK(r.samples[1] == doctest::Approx(-1.0));
  CHECK(r.samples[2] == doctest::Approx(0.25).epsilon(1e-4));
  std::remove(path.c_str());
}

TEST_CASE("random uniform reload error below 2^-14; float32 is near exact") {
  Pcg32 rng(99, 0);
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(8000);
  for (auto& s : w.samples) s = rng.uniform(-0.9, 0.9);

  const std::string p16 = tmp_path("tmse_u16.wav");
  save_wav(w, p16, WavEncoding::Pcm16);
  Waveform r16 = load_wav(p16);
  double e16 = 0;
  for (size_t i = 0; i < w.samples.size(); ++i)
    e16 = std::max(e16, std::fabs(r16.samples[i] - w.samples[i]));
  CHECK(e16 < std::pow(2.0, -14));

  const std::string p32 = tmp_path("tmse_u32.wav");
  save_wav(w, p32, WavEncoding::Float32);
  Waveform r32 = load_wav(p32);
  double e32 = 0;
  for (size_t i = 0; i < w.samples.size(); ++i)
    e32 = std::max(e32, std::fabs(r32.samples[i] - w.samples[i]));
  CHECK(e32 < 1e-7);
  std::remove(p16.c_str());
  std::remove(p32.c_str());
}

TEST_CASE("malformed and unsupported files are rejected") {
  const std::string path = tmp_path("tmse_bad.wav");
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("not a riff file at all", f);
    std::fclose(f);
  }
  CHECK_THROWS(load_wav(path));
  CHECK_THROWS(load_wav(tmp_path("tmse_does_not_exist.wav")));
  std::remove(path.c_str());
}

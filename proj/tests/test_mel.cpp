#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "tmse/mel.hpp"
#include "tmse/rng.hpp"

using namespace tmse;

TEST_CASE("256 bins x 80 mels builds the documented shape, nonnegative") {
  MelFilterbank fb = build_mel_filterbank(256, 80, 16000, 8000);
  CHECK(fb.n_freq == 256);
  CHECK(fb.n_mels == 80);
  CHECK(fb.weights.size() == 256u * 80u);
  for (double w : fb.weights) CHECK(w >= 0.0);
}

TEST_CASE("every filter column has exactly one local maximum") {
  for (auto [nf, nm] : std::vector<std::pair<int, int>>{{17, 5}, {129, 20}, {256, 80}}) {
    MelFilterbank fb = build_mel_filterbank(nf, nm, 16000, 8000);
    for (int m = 0; m < nm; ++m) {
      std::vector<double> col(static_cast<size_t>(nf));
      for (int f = 0; f < nf; ++f) col[static_cast<size_t>(f)] = fb.at(f, m);
      int peaks = 0;
      bool rising_done = false;
      for (int f = 1; f < nf; ++f) {
        if (col[static_cast<size_t>(f)] > col[static_cast<size_t>(f - 1)]) {
          CHECK(!rising_done);  // once falling, never rises again
        } else if (col[static_cast<size_t>(f)] < col[static_cast<size_t>(f - 1)]) {
          if (!rising_done) ++peaks;
          rising_done = true;
        }
      }
      CHECK(peaks <= 1);
    }
  }
}

TEST_CASE("all listed scale configs cover every interior bin") {
  const std::vector<std::pair<int, int>> scales = {{32, 5},   {64, 10},   {128, 20}, {256, 40},
                                                   {512, 80}, {1024, 160}, {2048, 210}};
  for (auto [frame, nm] : scales) {
    const int nf = frame / 2 + 1;
    MelFilterbank fb = build_mel_filterbank(nf, nm, 16000, 8000);
    for (int f = 1; f < nf - 1; ++f) {
      double s = 0;
      for (int m = 0; m < nm; ++m) s += fb.at(f, m);
      CHECK(s > 0.0);
    }
  }
}

TEST_CASE("one-hot magnitude picks out a filterbank column") {
  MelFilterbank fb = build_mel_filterbank(65, 12, 16000, 8000);
  const int b = 20;
  std::vector<double> mag(65, 0.0);
  mag[b] = 1.0;
  std::vector<double> out = apply_mel(mag, 65, 1, fb);
  for (int m = 0; m < 12; ++m) CHECK(out[static_cast<size_t>(m)] == doctest::Approx(fb.at(b, m)));
}

TEST_CASE("zero magnitudes give a zero mel frame") {
  MelFilterbank fb = build_mel_filterbank(33, 6, 16000, 8000);
  std::vector<double> mag(33 * 4, 0.0);
  for (double v : apply_mel(mag, 33, 4, fb)) CHECK(v == 0.0);
}

TEST_CASE("apply_mel equals the brute-force double loop") {
  Pcg32 rng(31, 0);
  const int nf = 129, nm = 20, nk = 7;
  MelFilterbank fb = build_mel_filterbank(nf, nm, 16000, 8000);
  std::vector<double> mag(static_cast<size_t>(nf) * nk);
  for (auto& v : mag) v = std::fabs(rng.next_normal());
  std::vector<double> got = apply_mel(mag, nf, nk, fb);
  for (int m = 0; m < nm; ++m)
    for (int k = 0; k < nk; ++k) {
      double want = 0;
      for (int f = 0; f < nf; ++f) want += mag[static_cast<size_t>(f) * nk + k] * fb.at(f, m);
      const double rel = std::fabs(got[static_cast<size_t>(m) * nk + k] - want) / (1.0 + std::fabs(want));
      CHECK(rel < 1e-12);
    }
}

TEST_CASE("degenerate and invalid requests are errors") {
  CHECK_THROWS(build_mel_filterbank(17, 17, 16000, 8000));   // n_mels >= n_freq
  CHECK_THROWS(build_mel_filterbank(256, 40, 16000, 9000));  // beyond Nyquist
  CHECK_THROWS(build_mel_filterbank(9, 7, 16000, 8000));     // centers collapse between bins
}

TEST_CASE("filterbank CSV export has one row per frequency bin") {
  MelFilterbank fb = build_mel_filterbank(33, 6, 16000, 8000);
  const std::string path =
      (std::filesystem::temp_directory_path() / "tmse_mel.csv").string();
  export_mel_csv(fb, path);
  std::ifstream f(path);
  int rows = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 33);
  std::remove(path.c_str());
}

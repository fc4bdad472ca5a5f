#include <doctest.h>

#include <cmath>
#include <complex>

#include "tmse/compress.hpp"
#include "tmse/rng.hpp"
#include "tmse/stft.hpp"

using namespace tmse;

namespace {
ComplexSpectrogram make_spec(int f, int k, uint64_t seed) {
  Pcg32 rng(seed, 0);
  ComplexSpectrogram s;
  s.n_freq = f;
  s.n_frames = k;
  s.v.resize(static_cast<size_t>(f) * k);
  for (auto& v : s.v) v = {rng.next_normal(), rng.next_normal()};
  return s;
}
}  // namespace

TEST_CASE("magnitude 4 compresses to 0.66 with the default alpha/beta") {
  ComplexSpectrogram s = make_spec(2, 2, 1);
  s.at(0, 0) = {4.0, 0.0};
  s.at(0, 1) = {0.0, -4.0};
  s.at(1, 0) = {0.0, 0.0};
  CompressedSpec c = compress(s, CompressionParams{});
  CHECK(c.values.at3(0, 0, 0) == doctest::Approx(0.66).epsilon(1e-12));
  CHECK(c.values.at3(1, 0, 0) == doctest::Approx(0.0));
  // phase preserved: pure negative-imaginary input stays on that axis
  CHECK(c.values.at3(0, 0, 1) == doctest::Approx(0.0));
  CHECK(c.values.at3(1, 0, 1) == doctest::Approx(-0.66).epsilon(1e-12));
  // zero sticks at zero
  CHECK(c.values.at3(0, 1, 0) == 0.0);
  CHECK(c.values.at3(1, 1, 0) == 0.0);
}

TEST_CASE("decompress is the analytic inverse (magnitude 0.66 -> 4)") {
  ComplexSpectrogram s = make_spec(1, 1, 2);
  s.at(0, 0) = {0.66, 0.0};
  CompressedSpec c;
  c.values = spectrogram_to_tensor(s);
  c.params = CompressionParams{};
  c.stft_cfg = s.cfg;
  ComplexSpectrogram d = decompress(c);
  CHECK(d.at(0, 0).real() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("decompress(compress(x)) round trip on random spectrograms") {
  for (uint64_t seed : {3u, 4u}) {
    ComplexSpectrogram s = make_spec(64, 33, seed);
    CompressedSpec c = compress(s, CompressionParams{});
    ComplexSpectrogram d = decompress(c);
    double num = 0, den = 0;
    for (size_t i = 0; i < s.v.size(); ++i) {
      num += std::norm(d.v[i] - s.v[i]);
      den += std::norm(s.v[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-9);
  }
}

TEST_CASE("compress preserves phase exactly on random elements") {
  ComplexSpectrogram s = make_spec(16, 8, 5);
  CompressedSpec c = compress(s, CompressionParams{});
  for (int f = 0; f < 16; ++f)
    for (int k = 0; k < 8; ++k) {
      const std::complex<double> orig = s.at(f, k);
      const std::complex<double> comp{c.values.at3(0, f, k), c.values.at3(1, f, k)};
      CHECK(std::arg(orig) == doctest::Approx(std::arg(comp)).epsilon(1e-9));
    }
}

TEST_CASE("parameter validation") {
  CompressionParams p;
  p.exponent_a = 0.0;
  CHECK_THROWS(p.validate());
  p = CompressionParams{};
  p.exponent_a = 1.5;
  CHECK_THROWS(p.validate());
  p = CompressionParams{};
  p.scale_b = -1.0;
  CHECK_THROWS(p.validate());
}

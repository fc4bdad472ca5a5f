#include "tmse/compress.hpp"

#include <cmath>

namespace tmse {

namespace {

// Maps (re, im) by magnitude power law m -> b * m^a, phase kept. Zero maps
// to zero (phase of zero taken as 0).
inline void map_pair(double re, double im, double a, double b, double& ore, double& oim) {
  double m = std::hypot(re, im);
  if (m == 0.0) {
    ore = 0.0;
    oim = 0.0;
    return;
  }
  double s = b * std::pow(m, a) / m;
  ore = s * re;
  oim = s * im;
}

}  // namespace

Tensor spectrogram_to_tensor(const ComplexSpectrogram& spec) {
  Tensor t({2, spec.n_freq, spec.n_frames});
  for (int f = 0; f < spec.n_freq; ++f)
    for (int k = 0; k < spec.n_frames; ++k) {
      t.at3(0, f, k) = spec.at(f, k).real();
      t.at3(1, f, k) = spec.at(f, k).imag();
    }
  return t;
}

ComplexSpectrogram tensor_to_spectrogram(const Tensor& t, const StftConfig& cfg) {
  if (t.ndim() != 3 || t.dim(0) != 2)
    throw std::invalid_argument("tensor_to_spectrogram: expected (2, F, K) tensor");
  ComplexSpectrogram spec;
  spec.cfg = cfg;
  spec.n_freq = t.dim(1);
  spec.n_frames = t.dim(2);
  spec.v.resize(static_cast<size_t>(spec.n_freq) * spec.n_frames);
  for (int f = 0; f < spec.n_freq; ++f)
    for (int k = 0; k < spec.n_frames; ++k)
      spec.at(f, k) = {t.at3(0, f, k), t.at3(1, f, k)};
  return spec;
}

Tensor compress_tensor(const Tensor& x, const CompressionParams& p) {
  p.validate();
  Tensor out(x.shape());
  const int f_dim = x.dim(1), k_dim = x.dim(2);
  for (int f = 0; f < f_dim; ++f)
    for (int k = 0; k < k_dim; ++k) {
      double ore, oim;
      map_pair(x.at3(0, f, k), x.at3(1, f, k), p.exponent_a, p.scale_b, ore, oim);
      out.at3(0, f, k) = ore;
      out.at3(1, f, k) = oim;
    }
  return out;
}

Tensor decompress_tensor(const Tensor& x, const CompressionParams& p) {
  p.validate();
  // inverse law: m -> (m / b)^(1/a)
  Tensor out(x.shape());
  const int f_dim = x.dim(1), k_dim = x.dim(2);
  const double inv_a = 1.0 / p.exponent_a;
  const double inv_b = std::pow(1.0 / p.scale_b, inv_a);
  for (int f = 0; f < f_dim; ++f)
    for (int k = 0; k < k_dim; ++k) {
      double ore, oim;
      map_pair(x.at3(0, f, k), x.at3(1, f, k), inv_a, inv_b, ore, oim);
      out.at3(0, f, k) = ore;
      out.at3(1, f, k) = oim;
    }
  return out;
}

CompressedSpec compress(const ComplexSpectrogram& spec, const CompressionParams& p) {
  CompressedSpec c;
  c.params = p;
  c.stft_cfg = spec.cfg;
  c.values = compress_tensor(spectrogram_to_tensor(spec), p);
  return c;
}

ComplexSpectrogram decompress(const CompressedSpec& cspec) {
  Tensor raw = decompress_tensor(cspec.values, cspec.params);
  return tensor_to_spectrogram(raw, cspec.stft_cfg);
}

}  // namespace tmse

#include "tmse/embed.hpp"

#include <cmath>
#include <stdexcept>

#include "tmse/rng.hpp"

namespace tmse {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
}

FourierFeatures::FourierFeatures(int dim_, double scale_, uint64_t seed) : dim(dim_), scale(scale_) {
  if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("FourierFeatures: dim must be even >= 2");
  Pcg32 rng(seed, 0x0f0f);
  freqs.resize(static_cast<size_t>(dim / 2));
  for (auto& f : freqs) f = rng.next_normal() * scale;
}

Tensor FourierFeatures::at(double t) const {
  Tensor out({dim});
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double a = kTwoPi * freqs[static_cast<size_t>(i)] * t;
    out[i] = std::sin(a);
    out[half + i] = std::cos(a);
  }
  return out;
}

TimestepEmbedding::TimestepEmbedding(const TimestepEmbedConfig& c)
    : cfg(c), fourier(c.dim, c.fourier_scale, c.seed), w({c.dim, c.dim}), b({c.dim}) {
  Pcg32 rng(c.seed, 0x1f1f);
  const double s = 1.0 / std::sqrt(static_cast<double>(c.dim));
  for (int64_t i = 0; i < w.size(); ++i) w[i] = rng.next_normal() * s;
  for (int64_t i = 0; i < b.size(); ++i) b[i] = 0.0;
}

Tensor timestep_embed(double t, const TimestepEmbedding& emb) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("timestep_embed: t must be in [0,1]");
  Tensor f = emb.fourier.at(t);
  Tensor out({emb.cfg.dim});
  for (int i = 0; i < emb.cfg.dim; ++i) {
    double s = emb.b[i];
    for (int j = 0; j < emb.cfg.dim; ++j) s += emb.w.at2(i, j) * f[j];
    out[i] = s / (1.0 + std::exp(-s));  // SiLU
  }
  return out;
}

}  // namespace tmse

#include "tmse/predictor.hpp"

#include <cmath>
#include <stdexcept>

#include "tmse/rng.hpp"

namespace tmse {

Tensor OraclePredictor::predict(const Tensor& x_t, const Tensor& x1, double) {
  require_same_shape(x_t, x1, "OraclePredictor::predict");
  require_same_shape(x_t, x0_, "OraclePredictor::predict");
  return x0_;
}

Tensor TrainablePredictor::predict(const Tensor& x_t, const Tensor& x1, double t) {
  ad::Tape tape;
  auto [out, ids] = build(tape, x_t, x1, t);
  (void)ids;
  return tape.val(out);
}

ToyPredictor::ToyPredictor(const ToyPredictorConfig& cfg)
    : cfg_(cfg),
      fourier_(cfg.embed_dim, cfg.fourier_scale, cfg.seed),
      w1_({cfg.hidden, cfg.embed_dim}),
      b1_({cfg.hidden}),
      w2_({2 * cfg.n_freq, cfg.hidden}),
      b2_({2 * cfg.n_freq}) {
  Pcg32 rng(cfg.seed, 0xA11CE);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
  for (int64_t i = 0; i < w1_.size(); ++i) w1_[i] = rng.next_normal() * s1;
  if (cfg.init_passthrough) {
    // w2 = 0 and bias selecting a = 0, b = 1: the initial predictor returns x1
    for (int i = 0; i < cfg.n_freq; ++i) {
      b2_[i] = 0.0;
      b2_[cfg.n_freq + i] = 1.0;
    }
  } else {
    const double s2 = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
    for (int64_t i = 0; i < w2_.size(); ++i) w2_[i] = rng.next_normal() * s2;
  }
}

std::vector<Tensor*> ToyPredictor::parameters() { return {&w1_, &b1_, &w2_, &b2_}; }

std::vector<std::pair<std::string, Tensor*>> ToyPredictor::named_parameters() {
  return {{"toy.w1", &w1_}, {"toy.b1", &b1_}, {"toy.w2", &w2_}, {"toy.b2", &b2_}};
}

std::pair<int, std::vector<int>> ToyPredictor::build(ad::Tape& tape, const Tensor& x_t,
                                                     const Tensor& x1, double t) {
  if (x_t.ndim() != 3 || x_t.dim(1) != cfg_.n_freq)
    throw std::invalid_argument("ToyPredictor: input must be (2, n_freq, K)");
  require_same_shape(x_t, x1, "ToyPredictor::build");

  const int iw1 = tape.input(w1_, true);
  const int ib1 = tape.input(b1_, true);
  const int iw2 = tape.input(w2_, true);
  const int ib2 = tape.input(b2_, true);
  const int ixt = tape.input(x_t, false);
  const int ix1 = tape.input(x1, false);
  const int iemb = tape.input(fourier_.at(t), false);

  const int h = tape.unary(tape.add(tape.matmul(iw1, iemb), ib1), ad::Unary::Silu);
  const int gbits = tape.add(tape.matmul(iw2, h), ib2);
  const int gain_a = tape.slice1d(gbits, 0, cfg_.n_freq);
  const int gain_b = tape.slice1d(gbits, cfg_.n_freq, cfg_.n_freq);
  const int out =
      tape.add(tape.scale_axis(ixt, gain_a, 1), tape.scale_axis(ix1, gain_b, 1));
  return {out, {iw1, ib1, iw2, ib2}};
}

std::pair<Tensor, Tensor> ToyPredictor::gains(double t) {
  Tensor emb = fourier_.at(t);
  Tensor h({cfg_.hidden});
  for (int i = 0; i < cfg_.hidden; ++i) {
    double s = b1_[i];
    for (int j = 0; j < cfg_.embed_dim; ++j) s += w1_.at2(i, j) * emb[j];
    h[i] = s / (1.0 + std::exp(-s));
  }
  Tensor a({cfg_.n_freq}), b({cfg_.n_freq});
  for (int i = 0; i < 2 * cfg_.n_freq; ++i) {
    double s = b2_[i];
    for (int j = 0; j < cfg_.hidden; ++j) s += w2_.at2(i, j) * h[j];
    if (i < cfg_.n_freq)
      a[i] = s;
    else
      b[i - cfg_.n_freq] = s;
  }
  return {a, b};
}

std::unique_ptr<ToyPredictor> make_toy_predictor(const ToyPredictorConfig& cfg) {
  return std::make_unique<ToyPredictor>(cfg);
}

}  // namespace tmse

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tmse/autodiff.hpp"
#include "tmse/embed.hpp"
#include "tmse/tensor.hpp"

namespace tmse {

// Contract: x_theta(x_t, x1, t) -> estimated clean target, same shape as x_t.
class TargetPredictor {
 public:
  virtual ~TargetPredictor() = default;
  virtual Tensor predict(const Tensor& x_t, const Tensor& x1, double t) = 0;
};

// Returns the bound clean signal regardless of inputs; isolates sampler
// behavior from learning quality.
class OraclePredictor : public TargetPredictor {
 public:
  explicit OraclePredictor(Tensor x0) : x0_(std::move(x0)) {}
  Tensor predict(const Tensor& x_t, const Tensor& x1, double t) override;

 private:
  Tensor x0_;
};

// Trainable predictors additionally expose their parameters and a tape
// builder so the training loop can differentiate through them.
class TrainablePredictor : public TargetPredictor {
 public:
  virtual std::vector<Tensor*> parameters() = 0;
  virtual std::vector<std::pair<std::string, Tensor*>> named_parameters() = 0;
  // Registers the parameters on the tape and returns (output node, list of
  // parameter node ids aligned with parameters()).
  virtual std::pair<int, std::vector<int>> build(ad::Tape& tape, const Tensor& x_t,
                                                 const Tensor& x1, double t) = 0;
  Tensor predict(const Tensor& x_t, const Tensor& x1, double t) override;
};

// Time-conditioned mixer: x0_hat = a(t) . x_t + b(t) . x1, with per-frequency
// gain vectors a, b produced by a two-layer MLP on the timestep features.
struct ToyPredictorConfig {
  int n_freq = 256;
  int hidden = 64;
  int embed_dim = 64;
  double fourier_scale = 16.0;
  uint64_t seed = 7;
  bool init_passthrough = true;  // start at a = 0, b = 1 (predict the noisy input)
};

class ToyPredictor : public TrainablePredictor {
 public:
  explicit ToyPredictor(const ToyPredictorConfig& cfg);

  std::vector<Tensor*> parameters() override;
  std::vector<std::pair<std::string, Tensor*>> named_parameters() override;
  std::pair<int, std::vector<int>> build(ad::Tape& tape, const Tensor& x_t, const Tensor& x1,
                                         double t) override;

  // Gain vectors for a given t (diagnostic).
  std::pair<Tensor, Tensor> gains(double t);

  const ToyPredictorConfig& config() const { return cfg_; }

  ToyPredictorConfig cfg_;
  FourierFeatures fourier_;
  Tensor w1_, b1_;  // (hidden, embed_dim), (hidden)
  Tensor w2_, b2_;  // (2*n_freq, hidden), (2*n_freq)
};

std::unique_ptr<ToyPredictor> make_toy_predictor(const ToyPredictorConfig& cfg);

}  // namespace tmse

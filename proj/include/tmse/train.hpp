#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmse/compress.hpp"
#include "tmse/loss.hpp"
#include "tmse/path.hpp"
#include "tmse/predictor.hpp"
#include "tmse/wav_io.hpp"

namespace tmse {

// One training pair in the compressed-spectrogram domain plus everything the
// signal-level losses need.
struct TrainItem {
  Tensor x0_spec;  // (2, F, K) compressed clean
  Tensor x1_spec;  // (2, F, K) compressed noisy
  Waveform clean_wav;
  std::vector<Tensor> mel_refs;  // per mel scale, (M_j, K_j); empty until prepared
};

struct TrainConfig {
  int epochs = 30;
  double lr = 1e-3;
  double t_eps = 0.03;
  double t_max = 0.97;
  uint64_t seed = 1234;
  CompositeWeights weights;
  MelLossConfig mel;
  StftConfig stft;
  CompressionParams comp;
};

struct EpochLog {
  int epoch = 0;
  double tm = 0, mel = 0, sisnr = 0, total = 0;
};

// Builds a TrainItem from a (clean, noisy) waveform pair; precomputes mel
// references when lambda_mel != 0.
TrainItem make_train_item(const Waveform& clean, const Waveform& noisy, const TrainConfig& cfg);

// Plain SGD over Algorithm-style steps: sample t ~ U[t_eps, t_max], sample z,
// perturb, predict, composite loss, backprop, fixed-step update. Throws on a
// non-finite loss with the epoch/step index in the message.
std::vector<EpochLog> train(std::vector<TrainItem>& items, const ProbabilityPath& path,
                            TrainablePredictor& predictor, const TrainConfig& cfg);

void write_loss_csv(const std::vector<EpochLog>& logs, const std::string& path);

}  // namespace tmse

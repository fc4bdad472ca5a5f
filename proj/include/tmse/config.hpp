#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmse/compress.hpp"
#include "tmse/dba.hpp"
#include "tmse/loss.hpp"
#include "tmse/path.hpp"
#include "tmse/predictor.hpp"
#include "tmse/sampler.hpp"
#include "tmse/schedule.hpp"
#include "tmse/synth.hpp"

namespace tmse {

// Flat key = value configuration ('#' starts a comment). Unknown keys are a
// hard error. See default_config_text() for the full key list with defaults.
struct RunConfig {
  // schedules
  std::string mean_kind = "logistic";
  double mean_k = 10.0;
  double mean_gamma = 1.5;
  std::string var_kind = "bridge";
  double var_sigma = 0.5;

  // sampler
  int sampler_steps = 4;
  double sampler_t_start = 0.97;
  double sampler_t_floor = 0.03;

  // stft / compression
  int stft_window = 510;
  int stft_hop = 128;
  bool stft_center = true;
  double compress_alpha = 0.5;
  double compress_beta = 0.33;

  // losses
  double lambda_mel = 0.1;
  double lambda_sisnr = 0.01;
  std::string mel_scales = "32:5,64:10,128:20,256:40,512:80,1024:160,2048:210";

  // predictor
  std::string predictor_kind = "toy";  // oracle | toy | dba
  int toy_hidden = 64;
  int embed_dim = 64;
  double embed_scale = 16.0;
  int dba_channels = 8;
  int dba_squeezed = 16;
  int dba_tf_blocks = 2;
  int dba_unet_depth = 1;
  int dba_freq_stride = 2;
  double dba_alpha_t = 1.0;
  double dba_beta_f = 1.0;
  int dba_groups = 4;

  // training
  int train_epochs = 30;
  double train_lr = 1e-3;
  double train_t_eps = 0.03;
  double train_t_max = 0.97;

  // schedule-curves / perturb-demo scalars
  double curves_x0 = 0.2;
  double curves_x1 = 1.0;

  // objective-variance study
  int64_t objvar_samples = 100000;
  int objvar_grid = 10;

  // synthetic data
  int synth_n_utts = 64;
  double synth_duration_s = 2.0;
  int synth_sample_rate = 16000;
  std::string synth_noise = "white";
  double synth_snr_min_db = 0.0;
  double synth_snr_max_db = 10.0;

  uint64_t seed = 1234;

  // --- loading / echo ---
  static RunConfig from_file(const std::string& path);
  void apply_line(const std::string& key, const std::string& value);
  std::string echo() const;               // effective key = value text
  void write_echo(const std::string& dir_or_file) const;
  static std::string default_config_text();

  // --- typed views ---
  MeanScheduleSpec mean_spec() const;
  VarianceScheduleSpec var_spec() const;
  ProbabilityPath path() const;
  SamplerConfig sampler() const;
  StftConfig stft() const;
  CompressionParams compression() const;
  CompositeWeights weights() const;
  MelLossConfig mel_cfg() const;
  SynthSpec synth_spec() const;
  ToyPredictorConfig toy_cfg() const;
  DbaLiteConfig dba_cfg() const;
};

}  // namespace tmse

#include "tmse/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tmse {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + v + "'");
}

// key handlers; kept in one table so parse and echo cannot drift apart
struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::map<std::string, Field> make_fields() {
  std::map<std::string, Field> f;
  auto str = [&](const char* key, std::string RunConfig::* m) {
    f[key] = {[m](RunConfig& c, const std::string& v) { c.*m = v; },
              [m](const RunConfig& c) { return c.*m; }};
  };
  auto dbl = [&](const char* key, double RunConfig::* m) {
    f[key] = {[m](RunConfig& c, const std::string& v) { c.*m = std::stod(v); },
              [m](const RunConfig& c) {
                std::ostringstream o;
                o << (c.*m);
                return o.str();
              }};
  };
  auto i32 = [&](const char* key, int RunConfig::* m) {
    f[key] = {[m](RunConfig& c, const std::string& v) { c.*m = std::stoi(v); },
              [m](const RunConfig& c) { return std::to_string(c.*m); }};
  };
  auto i64 = [&](const char* key, int64_t RunConfig::* m) {
    f[key] = {[m](RunConfig& c, const std::string& v) { c.*m = std::stoll(v); },
              [m](const RunConfig& c) { return std::to_string(c.*m); }};
  };
  auto u64 = [&](const char* key, uint64_t RunConfig::* m) {
    f[key] = {[m](RunConfig& c, const std::string& v) { c.*m = std::stoull(v); },
              [m](const RunConfig& c) { return std::to_string(c.*m); }};
  };
  auto bol = [&](const char* key, bool RunConfig::* m) {
    f[key] = {[m](RunConfig& c, const std::string& v) { c.*m = parse_bool(v); },
              [m](const RunConfig& c) { return c.*m ? "true" : "false"; }};
  };

  str("mean.kind", &RunConfig::mean_kind);
  dbl("mean.k", &RunConfig::mean_k);
  dbl("mean.gamma", &RunConfig::mean_gamma);
  str("var.kind", &RunConfig::var_kind);
  dbl("var.sigma", &RunConfig::var_sigma);
  i32("sampler.steps", &RunConfig::sampler_steps);
  dbl("sampler.t_start", &RunConfig::sampler_t_start);
  dbl("sampler.t_floor", &RunConfig::sampler_t_floor);
  i32("stft.window", &RunConfig::stft_window);
  i32("stft.hop", &RunConfig::stft_hop);
  bol("stft.center", &RunConfig::stft_center);
  dbl("compress.alpha", &RunConfig::compress_alpha);
  dbl("compress.beta", &RunConfig::compress_beta);
  dbl("loss.lambda_mel", &RunConfig::lambda_mel);
  dbl("loss.lambda_sisnr", &RunConfig::lambda_sisnr);
  str("mel.scales", &RunConfig::mel_scales);
  str("predictor.kind", &RunConfig::predictor_kind);
  i32("toy.hidden", &RunConfig::toy_hidden);
  i32("embed.dim", &RunConfig::embed_dim);
  dbl("embed.scale", &RunConfig::embed_scale);
  i32("dba.channels", &RunConfig::dba_channels);
  i32("dba.squeezed", &RunConfig::dba_squeezed);
  i32("dba.tf_blocks", &RunConfig::dba_tf_blocks);
  i32("dba.unet_depth", &RunConfig::dba_unet_depth);
  i32("dba.freq_stride", &RunConfig::dba_freq_stride);
  dbl("dba.alpha_t", &RunConfig::dba_alpha_t);
  dbl("dba.beta_f", &RunConfig::dba_beta_f);
  i32("dba.groups", &RunConfig::dba_groups);
  i32("train.epochs", &RunConfig::train_epochs);
  dbl("train.lr", &RunConfig::train_lr);
  dbl("train.t_eps", &RunConfig::train_t_eps);
  dbl("train.t_max", &RunConfig::train_t_max);
  dbl("curves.x0", &RunConfig::curves_x0);
  dbl("curves.x1", &RunConfig::curves_x1);
  i64("objvar.samples", &RunConfig::objvar_samples);
  i32("objvar.grid", &RunConfig::objvar_grid);
  i32("synth.n_utts", &RunConfig::synth_n_utts);
  dbl("synth.duration_s", &RunConfig::synth_duration_s);
  i32("synth.sample_rate", &RunConfig::synth_sample_rate);
  str("synth.noise", &RunConfig::synth_noise);
  dbl("synth.snr_min_db", &RunConfig::synth_snr_min_db);
  dbl("synth.snr_max_db", &RunConfig::synth_snr_max_db);
  u64("seed", &RunConfig::seed);
  return f;
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = make_fields();
  return f;
}

}  // namespace

void RunConfig::apply_line(const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw std::invalid_argument("config: unknown key '" + key + "'");
  try {
    it->second.set(*this, value);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad value for '" + key + "': '" + value + "'");
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key = value");
    cfg.apply_line(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string RunConfig::echo() const {
  std::ostringstream o;
  for (const auto& [key, field] : fields()) o << key << " = " << field.get(*this) << "\n";
  return o.str();
}

void RunConfig::write_echo(const std::string& dir_or_file) const {
  namespace fs = std::filesystem;
  fs::path p(dir_or_file);
  if (fs::is_directory(p) || dir_or_file.empty() || dir_or_file.back() == '/')
    p /= "effective_config.txt";
  std::ofstream f(p);
  if (!f) throw std::runtime_error("config: cannot write echo to " + p.string());
  f << echo();
}

std::string RunConfig::default_config_text() { return RunConfig().echo(); }

MeanScheduleSpec RunConfig::mean_spec() const {
  MeanScheduleSpec m;
  m.kind = mean_kind_from_string(mean_kind);
  m.gamma = mean_gamma;
  m.steepness_k = mean_k;
  m.validate();
  return m;
}

VarianceScheduleSpec RunConfig::var_spec() const {
  VarianceScheduleSpec v;
  v.kind = var_kind_from_string(var_kind);
  v.sigma_max = var_sigma;
  v.validate();
  return v;
}

ProbabilityPath RunConfig::path() const {
  ProbabilityPath p;
  p.mean = mean_spec();
  p.variance = var_spec();
  return p;
}

SamplerConfig RunConfig::sampler() const {
  SamplerConfig s;
  s.n_steps = sampler_steps;
  s.t_start = sampler_t_start;
  s.t_floor = sampler_t_floor;
  s.seed = {seed, 0};
  s.validate();
  return s;
}

StftConfig RunConfig::stft() const {
  StftConfig s;
  s.window_len = stft_window;
  s.fft_len = stft_window;
  s.hop = stft_hop;
  s.center_pad = stft_center;
  s.validate();
  return s;
}

CompressionParams RunConfig::compression() const {
  CompressionParams p;
  p.exponent_a = compress_alpha;
  p.scale_b = compress_beta;
  p.validate();
  return p;
}

CompositeWeights RunConfig::weights() const { return {lambda_mel, lambda_sisnr}; }

MelLossConfig RunConfig::mel_cfg() const {
  MelLossConfig cfg;
  cfg.scales.clear();
  std::istringstream in(mel_scales);
  std::string item;
  while (std::getline(in, item, ',')) {
    const size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("config: mel.scales entries must be frame:mels");
    cfg.scales.push_back({std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
  }
  if (cfg.scales.empty()) throw std::invalid_argument("config: mel.scales is empty");
  return cfg;
}

SynthSpec RunConfig::synth_spec() const {
  SynthSpec s;
  s.n_utts = synth_n_utts;
  s.duration_s = synth_duration_s;
  s.sample_rate = synth_sample_rate;
  s.noise = synth_noise;
  s.snr_min_db = synth_snr_min_db;
  s.snr_max_db = synth_snr_max_db;
  s.seed = seed;
  s.validate();
  return s;
}

ToyPredictorConfig RunConfig::toy_cfg() const {
  ToyPredictorConfig t;
  t.n_freq = stft().n_freq();
  t.hidden = toy_hidden;
  t.embed_dim = embed_dim;
  t.fourier_scale = embed_scale;
  t.seed = seed;
  return t;
}

DbaLiteConfig RunConfig::dba_cfg() const {
  DbaLiteConfig d;
  d.n_freq = stft().n_freq();
  d.channels = dba_channels;
  d.squeezed = dba_squeezed;
  d.tf_blocks = dba_tf_blocks;
  d.unet_depth = dba_unet_depth;
  d.freq_stride = dba_freq_stride;
  d.alpha_t = dba_alpha_t;
  d.beta_f = dba_beta_f;
  d.groups = dba_groups;
  d.embed_dim = embed_dim;
  d.fourier_scale = embed_scale;
  d.seed = seed;
  return d;
}

}  // namespace tmse

#include "tmse/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "tmse/checkpoint.hpp"
#include "tmse/enhance.hpp"
#include "tmse/train.hpp"

namespace fs = std::filesystem;

namespace tmse {

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f.precision(12);
  return f;
}

void echo_alongside(const RunConfig& cfg, const std::string& out_path) {
  fs::path p(out_path);
  if (fs::is_directory(p))
    cfg.write_echo(out_path);
  else {
    std::ofstream f(p.string() + ".config.txt");
    if (f) f << cfg.echo();
  }
  std::cout << "seed = " << cfg.seed << "\n";
}

std::vector<std::string> list_wavs(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".wav")
      names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  if (names.empty()) throw std::runtime_error("no .wav files in " + dir);
  return names;
}

std::unique_ptr<TrainablePredictor> make_trainable(const RunConfig& cfg) {
  if (cfg.predictor_kind == "toy") return make_toy_predictor(cfg.toy_cfg());
  if (cfg.predictor_kind == "dba") return make_dba_lite(cfg.dba_cfg());
  throw std::invalid_argument("predictor.kind must be toy or dba for training, got '" +
                              cfg.predictor_kind + "'");
}

void load_params(TrainablePredictor& net, const std::vector<std::pair<std::string, Tensor>>& ts) {
  auto named = net.named_parameters();
  if (named.size() != ts.size())
    throw std::runtime_error("checkpoint/config mismatch: parameter count differs");
  std::map<std::string, Tensor*> by_name;
  for (auto& [n, p] : named) by_name[n] = p;
  for (const auto& [n, t] : ts) {
    auto it = by_name.find(n);
    if (it == by_name.end())
      throw std::runtime_error("checkpoint/config mismatch: unexpected tensor '" + n + "'");
    if (!(it->second->shape() == t.shape()))
      throw std::runtime_error("checkpoint/config mismatch: shape of '" + n + "' differs");
    *it->second = t;
  }
}

void write_pgm(const Tensor& spec2fk, const std::string& path, double scale_max) {
  const int f = spec2fk.dim(1), k = spec2fk.dim(2);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "P5\n" << k << " " << f << "\n255\n";
  // low frequencies at the bottom row, magnitudes on a sqrt scale
  for (int fi = f - 1; fi >= 0; --fi)
    for (int ki = 0; ki < k; ++ki) {
      const double m = std::hypot(spec2fk.at3(0, fi, ki), spec2fk.at3(1, fi, ki));
      const double v = std::sqrt(std::min(m / scale_max, 1.0));
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
}

}  // namespace

int cmd_schedule_curves(const RunConfig& cfg, const std::string& out_csv) {
  const double x0 = cfg.curves_x0, x1 = cfg.curves_x1;
  MeanScheduleSpec lin{MeanKind::Linear, cfg.mean_gamma, cfg.mean_k};
  MeanScheduleSpec ouve{MeanKind::Ouve, cfg.mean_gamma, cfg.mean_k};
  MeanScheduleSpec logi{MeanKind::Logistic, cfg.mean_gamma, cfg.mean_k};
  // SNR columns compare the mean schedules alone (sigma = 0), mirroring the
  // x0 = 0.2, x1 = 1 scalar comparison.
  VarianceScheduleSpec novar{VarKind::Constant, 0.0};

  std::vector<double> grid(200);
  for (int i = 0; i < 200; ++i) grid[static_cast<size_t>(i)] = 0.005 + (0.995 - 0.005) * i / 199.0;

  const SnrCurve snr_lin = snr_trajectory(lin, novar, x0, x1, grid);
  const SnrCurve snr_ouve = snr_trajectory(ouve, novar, x0, x1, grid);
  const SnrCurve snr_logi = snr_trajectory(logi, novar, x0, x1, grid);

  auto f = open_csv(out_csv);
  f << "t,mu_linear,mu_ouve,mu_logistic,snr_linear,snr_ouve,snr_logistic\n";
  for (size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    f << t << "," << mean_at(lin, t, x0, x1) << "," << mean_at(ouve, t, x0, x1) << ","
      << mean_at(logi, t, x0, x1) << "," << snr_lin.snr_db[i] << "," << snr_ouve.snr_db[i] << ","
      << snr_logi.snr_db[i] << "\n";
  }
  echo_alongside(cfg, out_csv);
  return 0;
}

int cmd_objective_variance(const RunConfig& cfg, const std::string& out_csv) {
  const ProbabilityPath path = cfg.path();
  const double x0 = cfg.curves_x0, x1 = cfg.curves_x1;
  const int64_t m = cfg.objvar_samples;
  if (m < 2) throw std::invalid_argument("objvar.samples must be >= 2");

  auto f = open_csv(out_csv);
  f << "t,var_fm_empirical,var_fm_analytic,var_tm\n";
  Pcg32 rng(cfg.seed, 0x0B5);
  for (int gi = 0; gi < cfg.objvar_grid; ++gi) {
    const double t = 0.05 + (0.95 - 0.05) * gi / std::max(1, cfg.objvar_grid - 1);
    const double dsig = sigma_derivative_at(path.variance, t);
    const double dmu = mean_derivative_at(path.mean, t, x0, x1);
    // FM target sigma'_t z + mu'_t across z draws; TM target is x0, constant
    double mean = 0, m2 = 0;
    double tm_mean = 0, tm_m2 = 0;
    for (int64_t i = 0; i < m; ++i) {
      const double u = dsig * rng.next_normal() + dmu;
      const double d = u - mean;
      mean += d / static_cast<double>(i + 1);
      m2 += d * (u - mean);
      const double dt0 = x0 - tm_mean;
      tm_mean += dt0 / static_cast<double>(i + 1);
      tm_m2 += dt0 * (x0 - tm_mean);
    }
    f << t << "," << m2 / static_cast<double>(m - 1) << "," << dsig * dsig << ","
      << tm_m2 / static_cast<double>(m - 1) << "\n";
  }
  echo_alongside(cfg, out_csv);
  return 0;
}

int cmd_oracle_convergence(const RunConfig& cfg, const std::string& out_csv) {
  const ProbabilityPath path = cfg.path();
  const int n_instances = 20;
  const std::vector<int> steps = {4, 8, 16, 32, 64};

  // random compressed-spectrogram stand-ins
  std::vector<Tensor> x0s, x1s;
  Pcg32 rng(cfg.seed, 0x0C01);
  for (int i = 0; i < n_instances; ++i) {
    x0s.push_back(rng.normal_tensor({2, 64, 64}));
    x1s.push_back(rng.normal_tensor({2, 64, 64}));
  }

  auto f = open_csv(out_csv);
  f << "n_steps,mean_rel_error\n";
  for (int n : steps) {
    double acc = 0;
    for (int i = 0; i < n_instances; ++i) {
      SamplerConfig sc = cfg.sampler();
      sc.n_steps = n;
      OraclePredictor oracle(x0s[static_cast<size_t>(i)]);
      const EulerResult res = euler_solve(path, oracle, x1s[static_cast<size_t>(i)], sc);
      acc += rel_l2_error(res.final_state, x0s[static_cast<size_t>(i)]);
    }
    f << n << "," << acc / n_instances << "\n";
  }
  echo_alongside(cfg, out_csv);
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir) {
  fs::create_directories(out_dir);

  TrainConfig tc;
  tc.epochs = cfg.train_epochs;
  tc.lr = cfg.train_lr;
  tc.t_eps = cfg.train_t_eps;
  tc.t_max = cfg.train_t_max;
  tc.seed = cfg.seed;
  tc.weights = cfg.weights();
  tc.mel = cfg.mel_cfg();
  tc.stft = cfg.stft();
  tc.comp = cfg.compression();

  std::vector<TrainItem> items;
  if (data_dir.empty()) {
    for (const auto& pair : generate(cfg.synth_spec()))
      items.push_back(make_train_item(pair.clean, pair.noisy, tc));
  } else {
    const fs::path clean_dir = fs::path(data_dir) / "clean";
    const fs::path noisy_dir = fs::path(data_dir) / "noisy";
    for (const auto& name : list_wavs(clean_dir.string())) {
      const fs::path noisy = noisy_dir / name;
      if (!fs::exists(noisy)) throw std::runtime_error("missing noisy partner for " + name);
      items.push_back(make_train_item(load_wav((clean_dir / name).string()),
                                      load_wav(noisy.string()), tc));
    }
  }

  auto net = make_trainable(cfg);
  const std::vector<EpochLog> logs = train(items, cfg.path(), *net, tc);
  write_loss_csv(logs, (fs::path(out_dir) / "loss.csv").string());

  std::vector<std::pair<std::string, Tensor>> tensors;
  for (auto& [name, p] : net->named_parameters()) tensors.emplace_back(name, *p);
  std::map<std::string, std::string> meta;
  meta["predictor"] = cfg.predictor_kind;
  meta["config"] = cfg.echo();
  save_checkpoint((fs::path(out_dir) / "checkpoint.tmck").string(), meta, tensors);

  cfg.write_echo(out_dir);
  std::cout << "seed = " << cfg.seed << "\n";
  std::cout << "trained " << tc.epochs << " epochs on " << items.size()
            << " utterances; final loss " << logs.back().total << "\n";
  return 0;
}

int cmd_enhance(const RunConfig& run_cfg, const std::string& checkpoint,
                const std::string& oracle_clean_dir, const std::string& in_dir,
                const std::string& out_dir) {
  fs::create_directories(out_dir);
  RunConfig cfg = run_cfg;

  std::unique_ptr<TrainablePredictor> net;
  if (!checkpoint.empty()) {
    std::map<std::string, std::string> meta;
    std::vector<std::pair<std::string, Tensor>> tensors;
    load_checkpoint(checkpoint, meta, tensors);
    if (!meta.count("predictor") || !meta.count("config"))
      throw std::runtime_error("checkpoint missing metadata");
    // rebuild the architecture from the checkpoint's own config echo
    auto trim = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      const size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::istringstream in(meta["config"]);
    std::string line;
    while (std::getline(in, line)) {
      const size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(0, eq));
      if (key.rfind("predictor", 0) == 0 || key.rfind("toy.", 0) == 0 ||
          key.rfind("dba.", 0) == 0 || key.rfind("embed.", 0) == 0 || key == "seed" ||
          key.rfind("stft.", 0) == 0)
        cfg.apply_line(key, trim(line.substr(eq + 1)));
    }
    net = make_trainable(cfg);
    load_params(*net, tensors);
  } else if (oracle_clean_dir.empty()) {
    throw std::invalid_argument("enhance needs a checkpoint or --oracle-with DIR");
  }

  const StftConfig stft_cfg = cfg.stft();
  const CompressionParams comp = cfg.compression();
  const ProbabilityPath path = cfg.path();
  const SamplerConfig sampler = cfg.sampler();

  for (const auto& name : list_wavs(in_dir)) {
    const Waveform noisy = load_wav((fs::path(in_dir) / name).string());
    Waveform out;
    if (net) {
      out = enhance_waveform(noisy, *net, path, sampler, stft_cfg, comp);
    } else {
      const fs::path clean_path = fs::path(oracle_clean_dir) / name;
      if (!fs::exists(clean_path)) throw std::runtime_error("missing clean partner for " + name);
      const Waveform clean = load_wav(clean_path.string());
      OraclePredictor oracle(waveform_to_compressed(clean, stft_cfg, comp));
      out = enhance_waveform(noisy, oracle, path, sampler, stft_cfg, comp);
    }
    save_wav(out, (fs::path(out_dir) / name).string());
  }
  cfg.write_echo(out_dir);
  std::cout << "seed = " << cfg.seed << "\n";
  return 0;
}

int cmd_eval(const std::string& est_dir, const std::string& ref_dir, const std::string& out_csv) {
  auto f = open_csv(out_csv);
  f << "file,si_sdr_db,snr_db\n";
  std::vector<double> sdrs, snrs;
  for (const auto& name : list_wavs(est_dir)) {
    const fs::path ref_path = fs::path(ref_dir) / name;
    if (!fs::exists(ref_path)) throw std::runtime_error("missing reference for " + name);
    const Waveform est = load_wav((fs::path(est_dir) / name).string());
    const Waveform ref = load_wav(ref_path.string());
    const double sdr = si_sdr(est, ref);
    const double snr = plain_snr(est, ref);
    sdrs.push_back(sdr);
    snrs.push_back(snr);
    f << name << "," << sdr << "," << snr << "\n";
  }
  auto mean_std = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0;
    for (double x : v) s2 += (x - m) * (x - m);
    return std::pair<double, double>(m, v.size() > 1 ? std::sqrt(s2 / (v.size() - 1)) : 0.0);
  };
  const auto [sdr_m, sdr_s] = mean_std(sdrs);
  const auto [snr_m, snr_s] = mean_std(snrs);
  f << "mean," << sdr_m << "," << snr_m << "\n";
  f << "std," << sdr_s << "," << snr_s << "\n";
  std::cout << "si_sdr " << sdr_m << " +- " << sdr_s << " dB over " << sdrs.size() << " files\n";
  return 0;
}

int cmd_perturb_demo(const RunConfig& cfg, const std::string& clean_wav,
                     const std::string& noisy_wav, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const StftConfig stft_cfg = cfg.stft();
  const CompressionParams comp = cfg.compression();
  const Waveform clean = load_wav(clean_wav);
  const Waveform noisy = load_wav(noisy_wav);
  if (clean.samples.size() != noisy.samples.size())
    throw std::runtime_error("perturb-demo: clean/noisy length mismatch");

  const Tensor x0 = waveform_to_compressed(clean, stft_cfg, comp);
  const Tensor x1 = waveform_to_compressed(noisy, stft_cfg, comp);
  double scale_max = 1e-12;
  for (int64_t i = 0; i < x0.size(); ++i) scale_max = std::max(scale_max, std::fabs(x0[i]));
  scale_max *= 1.5;

  const double x0_energy = [&] {
    double s = 0;
    for (int64_t i = 0; i < x0.size(); ++i) s += x0[i] * x0[i];
    return s;
  }();

  auto f = open_csv((fs::path(out_dir) / "perturb_snr.csv").string());
  f << "schedule,t,empirical_snr_db\n";

  const std::vector<std::pair<std::string, MeanKind>> schedules = {
      {"linear", MeanKind::Linear}, {"ouve", MeanKind::Ouve}, {"logistic", MeanKind::Logistic}};
  for (const auto& [name, kind] : schedules) {
    ProbabilityPath path = cfg.path();
    path.mean.kind = kind;
    for (int ti = 1; ti <= 9; ++ti) {
      const double t = 0.1 * ti;
      Pcg32 rng(cfg.seed, 0x9E2 + static_cast<uint64_t>(ti));  // same z across schedules
      const PerturbedSample ps = sample_perturbed(path, t, x0, x1, rng);
      char fname[64];
      std::snprintf(fname, sizeof(fname), "%s_t%02d.pgm", name.c_str(), ti);
      write_pgm(ps.x_t, (fs::path(out_dir) / fname).string(), scale_max);
      double err = 0;
      for (int64_t i = 0; i < x0.size(); ++i) {
        const double d = ps.x_t[i] - x0[i];
        err += d * d;
      }
      f << name << "," << t << "," << 10.0 * std::log10(x0_energy / std::max(err, 1e-300)) << "\n";
    }
  }
  cfg.write_echo(out_dir);
  std::cout << "seed = " << cfg.seed << "\n";
  return 0;
}

}  // namespace tmse

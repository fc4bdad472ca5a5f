#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "tmse/commands.hpp"

namespace {

tmse::RunConfig load_config(const std::string& config_path, uint64_t seed_override,
                            bool seed_set, int steps_override) {
  tmse::RunConfig cfg =
      config_path.empty() ? tmse::RunConfig() : tmse::RunConfig::from_file(config_path);
  if (seed_set) cfg.seed = seed_override;
  if (steps_override > 0) cfg.sampler_steps = steps_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"target-matching generative speech enhancement toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_dir, checkpoint, oracle_dir, in_dir, ref_dir;
  std::string clean_wav, noisy_wav;
  uint64_t seed = 0;
  bool seed_set = false, synthetic = false;
  int steps = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (key = value lines)");
    sub->add_option("--seed", seed, "RNG seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--steps", steps, "sampler NFE override");
  };

  auto* curves = app.add_subcommand("schedule-curves", "mean schedules and SNR curves as CSV");
  add_common(curves);
  curves->add_option("--out", out_path, "output CSV")->required();

  auto* objvar = app.add_subcommand("objective-variance",
                                    "Monte-Carlo variance of the FM vs TM regression targets");
  add_common(objvar);
  objvar->add_option("--out", out_path, "output CSV")->required();

  auto* conv = app.add_subcommand("oracle-convergence", "Euler error vs NFE with the oracle");
  add_common(conv);
  conv->add_option("--out", out_path, "output CSV")->required();

  auto* train = app.add_subcommand("train", "train a predictor (Algorithm-style loop)");
  add_common(train);
  train->add_option("--data", data_dir, "directory holding clean/ and noisy/ WAV pairs");
  train->add_flag("--synthetic", synthetic, "use the synthetic preset from the config");
  train->add_option("--out", out_path, "output directory")->required();

  auto* enh = app.add_subcommand("enhance", "enhance WAV files");
  add_common(enh);
  enh->add_option("--checkpoint", checkpoint, "trained checkpoint");
  enh->add_option("--oracle-with", oracle_dir, "clean WAV dir for an oracle run");
  enh->add_option("--in", in_dir, "input WAV directory")->required();
  enh->add_option("--out", out_path, "output directory")->required();

  auto* ev = app.add_subcommand("eval", "SI-SDR / SNR against references");
  ev->add_option("--est", in_dir, "estimate WAV directory")->required();
  ev->add_option("--ref", ref_dir, "reference WAV directory")->required();
  ev->add_option("--out", out_path, "output CSV")->required();

  auto* demo = app.add_subcommand("perturb-demo", "perturbed spectrogram grids per schedule");
  add_common(demo);
  demo->add_option("--clean", clean_wav, "clean WAV")->required();
  demo->add_option("--noisy", noisy_wav, "noisy WAV")->required();
  demo->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const tmse::RunConfig cfg = load_config(config_path, seed, seed_set, steps);
    if (curves->parsed()) return tmse::cmd_schedule_curves(cfg, out_path);
    if (objvar->parsed()) return tmse::cmd_objective_variance(cfg, out_path);
    if (conv->parsed()) return tmse::cmd_oracle_convergence(cfg, out_path);
    if (train->parsed()) {
      if (synthetic == data_dir.empty() && !synthetic)
        throw std::invalid_argument("train needs --data DIR or --synthetic");
      return tmse::cmd_train(cfg, synthetic ? "" : data_dir, out_path);
    }
    if (enh->parsed()) return tmse::cmd_enhance(cfg, checkpoint, oracle_dir, in_dir, out_path);
    if (ev->parsed()) return tmse::cmd_eval(in_dir, ref_dir, out_path);
    if (demo->parsed()) return tmse::cmd_perturb_demo(cfg, clean_wav, noisy_wav, out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error[config] " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error[runtime] " << e.what() << "\n";
    return 1;
  }
  return 0;
}

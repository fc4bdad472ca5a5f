#pragma once

#include <string>

#include "tmse/config.hpp"

namespace tmse {

// CLI command bodies. Each writes its artifacts plus an effective-config
// echo, and throws on failure (the CLI maps exceptions to tagged exit
// lines). Return value is the process exit code (0 on success).

int cmd_schedule_curves(const RunConfig& cfg, const std::string& out_csv);
int cmd_objective_variance(const RunConfig& cfg, const std::string& out_csv);
int cmd_oracle_convergence(const RunConfig& cfg, const std::string& out_csv);

// data_dir empty => synthetic preset from the config.
int cmd_train(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir);

// Either a checkpoint path or (oracle_clean_dir non-empty) an oracle run
// against matching clean files.
int cmd_enhance(const RunConfig& cfg, const std::string& checkpoint,
                const std::string& oracle_clean_dir, const std::string& in_dir,
                const std::string& out_dir);

int cmd_eval(const std::string& est_dir, const std::string& ref_dir, const std::string& out_csv);

int cmd_perturb_demo(const RunConfig& cfg, const std::string& clean_wav,
                     const std::string& noisy_wav, const std::string& out_dir);

}  // namespace tmse

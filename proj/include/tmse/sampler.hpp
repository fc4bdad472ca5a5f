#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tmse/path.hpp"
#include "tmse/predictor.hpp"

namespace tmse {

struct SamplerConfig {
  int n_steps = 4;        // NFE
  double t_start = 0.97;  // T
  double t_floor = 0.03;
  bool record_trajectory = false;
  RngSeed seed;  // reserved; the Euler solver draws nothing

  void validate() const {
    if (n_steps < 1) throw std::invalid_argument("SamplerConfig: n_steps must be >= 1");
    if (!(0.0 <= t_floor && t_floor < t_start && t_start <= 1.0))
      throw std::invalid_argument("SamplerConfig: need 0 <= t_floor < t_start <= 1");
  }
};

struct Trajectory {
  std::vector<std::pair<double, Tensor>> states;  // (t, x_t), times strictly decreasing
};

struct EulerResult {
  Tensor x0_hat;          // predictor estimate at the final time
  Tensor final_state;     // raw ODE state at t_floor
  Trajectory trajectory;  // populated when record_trajectory is set
};

// One Euler update x_next = x_t + dt * u_tilde; also returns the predictor
// output used for the field.
std::pair<Tensor, Tensor> euler_step(const ProbabilityPath& path, TargetPredictor& predictor,
                                     const Tensor& x_t, const Tensor& x1, double t, double dt);

// Algorithm: start at x = x1, t = t_start; take n_steps uniform steps down
// to t_floor; return the predictor estimate at the final time (the raw state
// is available alongside and in the trajectory).
EulerResult euler_solve(const ProbabilityPath& path, TargetPredictor& predictor, const Tensor& x1,
                        const SamplerConfig& cfg);

// CSV: step, t, state L2 norm, and L2 distance to the reference if given.
void dump_trajectory_csv(const Trajectory& traj, const std::string& path,
                         const Tensor* reference = nullptr);

}  // namespace tmse

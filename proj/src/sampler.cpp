#include "tmse/sampler.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tmse {

std::pair<Tensor, Tensor> euler_step(const ProbabilityPath& path, TargetPredictor& predictor,
                                     const Tensor& x_t, const Tensor& x1, double t, double dt) {
  if (dt < 0) throw std::invalid_argument("euler_step: dt must be >= 0");
  Tensor x0_hat = predictor.predict(x_t, x1, t);
  require_same_shape(x0_hat, x_t, "euler_step: predictor output");
  if (dt == 0.0) return {x_t, std::move(x0_hat)};
  Tensor u = vector_field_from_predictor(path, t, x_t, x1, x0_hat);
  Tensor x_next(x_t.shape());
  for (int64_t i = 0; i < x_next.size(); ++i) x_next[i] = x_t[i] + dt * u[i];
  return {std::move(x_next), std::move(x0_hat)};
}

EulerResult euler_solve(const ProbabilityPath& path, TargetPredictor& predictor, const Tensor& x1,
                        const SamplerConfig& cfg) {
  cfg.validate();
  if (!x1.all_finite()) throw std::invalid_argument("euler_solve: non-finite input");

  const double dt = (cfg.t_start - cfg.t_floor) / cfg.n_steps;
  Tensor x = x1;
  EulerResult res;
  if (cfg.record_trajectory) res.trajectory.states.emplace_back(cfg.t_start, x);

  for (int n = 0; n < cfg.n_steps; ++n) {
    const double t = cfg.t_start - n * dt;
    auto [x_next, x0_hat] = euler_step(path, predictor, x, x1, t, dt);
    x = std::move(x_next);
    if (!x.all_finite())
      throw std::runtime_error("euler_solve: non-finite state after step " + std::to_string(n));
    if (cfg.record_trajectory)
      res.trajectory.states.emplace_back(cfg.t_start - (n + 1) * dt, x);
  }

  res.x0_hat = predictor.predict(x, x1, cfg.t_floor);
  res.final_state = std::move(x);
  return res;
}

void dump_trajectory_csv(const Trajectory& traj, const std::string& path, const Tensor* reference) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("dump_trajectory_csv: cannot open " + path);
  f << "step,t,state_l2" << (reference ? ",dist_to_ref\n" : "\n");
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& [t, x] = traj.states[i];
    f << i << "," << t << "," << l2_norm(x);
    if (reference) {
      double d = 0;
      for (int64_t j = 0; j < x.size(); ++j) {
        const double e = x[j] - (*reference)[j];
        d += e * e;
      }
      f << "," << std::sqrt(d);
    }
    f << "\n";
  }
}

}  // namespace tmse

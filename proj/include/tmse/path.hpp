#pragma once

#include "tmse/rng.hpp"
#include "tmse/schedule.hpp"
#include "tmse/tensor.hpp"

namespace tmse {

// Gaussian probability path: N(mu_t(x0, x1), sigma_t^2), elementwise over
// tensors. t is clamped to [t_eps, t_max] where the variance must stay
// nonzero for the field evaluations.
struct ProbabilityPath {
  MeanScheduleSpec mean;
  VarianceScheduleSpec variance;
  double t_eps = 1e-4;
  double t_max = 1.0 - 1e-4;

  double clamp_t(double t) const { return std::min(std::max(t, t_eps), t_max); }
};

struct PerturbedSample {
  Tensor x_t;
  Tensor z;
  double t = 0;
};

// x_t = mu_t(x0, x1) + sigma_t * z with z ~ N(0, I); returns both x_t and z.
PerturbedSample sample_perturbed(const ProbabilityPath& path, double t, const Tensor& x0,
                                 const Tensor& x1, Pcg32& rng);

// Forward-time field (sigma'_t/sigma_t)(x_t - mu_t) + mu'_t. Requires
// sigma_t > 0.
Tensor vector_field_exact(const ProbabilityPath& path, double t, const Tensor& x_t,
                          const Tensor& x0, const Tensor& x1);

// Same field written in the noise variable: sigma'_t z + mu'_t. This is the
// flow-matching regression target; stochastic whenever sigma'_t != 0.
Tensor vector_field_decomposed(const ProbabilityPath& path, double t, const Tensor& z,
                               const Tensor& x0, const Tensor& x1);

// Reverse-time field used by the sampler: the forward field evaluated with
// the predicted target in place of x0, negated so that the solver's
// x <- x + dt * u update transports the state toward decreasing t. When
// sigma_t vanishes the first term is taken as 0 provided x_t sits on the
// mean trajectory (within 1e-12); otherwise this is a domain error.
Tensor vector_field_from_predictor(const ProbabilityPath& path, double t, const Tensor& x_t,
                                   const Tensor& x1, const Tensor& x0_hat);

// Scalar conveniences for desk checks.
double vector_field_exact(const ProbabilityPath& path, double t, double x_t, double x0, double x1);
double vector_field_decomposed(const ProbabilityPath& path, double t, double z, double x0,
                               double x1);
double vector_field_from_predictor(const ProbabilityPath& path, double t, double x_t, double x1,
                                   double x0_hat);

}  // namespace tmse

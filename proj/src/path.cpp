#include "tmse/path.hpp"

#include <cmath>
#include <stdexcept>

namespace tmse {

namespace {
constexpr double kDegenerateTol = 1e-12;
}

PerturbedSample sample_perturbed(const ProbabilityPath& path, double t, const Tensor& x0,
                                 const Tensor& x1, Pcg32& rng) {
  require_same_shape(x0, x1, "sample_perturbed");
  const double tc = path.clamp_t(t);
  const double mix = mean_mix(path.mean, tc);
  const double sig = sigma_at(path.variance, tc);

  PerturbedSample s;
  s.t = tc;
  s.z = rng.normal_tensor(x0.shape());
  s.x_t = Tensor(x0.shape());
  for (int64_t i = 0; i < x0.size(); ++i) {
    const double mu = x0[i] + mix * (x1[i] - x0[i]);
    s.x_t[i] = mu + sig * s.z[i];
  }
  return s;
}

Tensor vector_field_exact(const ProbabilityPath& path, double t, const Tensor& x_t,
                          const Tensor& x0, const Tensor& x1) {
  require_same_shape(x_t, x0, "vector_field_exact");
  require_same_shape(x_t, x1, "vector_field_exact");
  const double sig = sigma_at(path.variance, t);
  if (sig <= 0.0) throw std::domain_error("vector_field_exact: sigma_t must be > 0");
  const double ratio = sigma_derivative_at(path.variance, t) / sig;
  const double mix = mean_mix(path.mean, t);
  const double dmix = mean_mix_derivative(path.mean, t);

  Tensor u(x_t.shape());
  for (int64_t i = 0; i < u.size(); ++i) {
    const double diff = x1[i] - x0[i];
    const double mu = x0[i] + mix * diff;
    u[i] = ratio * (x_t[i] - mu) + dmix * diff;
  }
  return u;
}

Tensor vector_field_decomposed(const ProbabilityPath& path, double t, const Tensor& z,
                               const Tensor& x0, const Tensor& x1) {
  require_same_shape(z, x0, "vector_field_decomposed");
  require_same_shape(z, x1, "vector_field_decomposed");
  const double dsig = sigma_derivative_at(path.variance, t);
  const double dmix = mean_mix_derivative(path.mean, t);

  Tensor u(z.shape());
  for (int64_t i = 0; i < u.size(); ++i) u[i] = dsig * z[i] + dmix * (x1[i] - x0[i]);
  return u;
}

Tensor vector_field_from_predictor(const ProbabilityPath& path, double t, const Tensor& x_t,
                                   const Tensor& x1, const Tensor& x0_hat) {
  require_same_shape(x_t, x1, "vector_field_from_predictor");
  require_same_shape(x_t, x0_hat, "vector_field_from_predictor");
  const double sig = sigma_at(path.variance, t);
  const double mix = mean_mix(path.mean, t);
  const double dmix = mean_mix_derivative(path.mean, t);

  Tensor u(x_t.shape());
  if (sig <= kDegenerateTol) {
    // exact-mean trajectory: first term defined as 0, but only if the state
    // actually sits on the mean
    for (int64_t i = 0; i < u.size(); ++i) {
      const double mu = x0_hat[i] + mix * (x1[i] - x0_hat[i]);
      if (std::fabs(x_t[i] - mu) > kDegenerateTol)
        throw std::domain_error(
            "vector_field_from_predictor: sigma_t = 0 off the mean trajectory");
      u[i] = -dmix * (x1[i] - x0_hat[i]);
    }
    return u;
  }

  const double ratio = sigma_derivative_at(path.variance, t) / sig;
  for (int64_t i = 0; i < u.size(); ++i) {
    const double diff = x1[i] - x0_hat[i];
    const double mu = x0_hat[i] + mix * diff;
    u[i] = -(ratio * (x_t[i] - mu) + dmix * diff);
  }
  return u;
}

double vector_field_exact(const ProbabilityPath& path, double t, double x_t, double x0,
                          double x1) {
  Tensor a = Tensor::scalar(x_t), b = Tensor::scalar(x0), c = Tensor::scalar(x1);
  return vector_field_exact(path, t, a, b, c)[0];
}

double vector_field_decomposed(const ProbabilityPath& path, double t, double z, double x0,
                               double x1) {
  Tensor a = Tensor::scalar(z), b = Tensor::scalar(x0), c = Tensor::scalar(x1);
  return vector_field_decomposed(path, t, a, b, c)[0];
}

double vector_field_from_predictor(const ProbabilityPath& path, double t, double x_t, double x1,
                                   double x0_hat) {
  Tensor a = Tensor::scalar(x_t), b = Tensor::scalar(x1), c = Tensor::scalar(x0_hat);
  return vector_field_from_predictor(path, t, a, b, c)[0];
}

}  // namespace tmse

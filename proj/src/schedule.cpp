#include "tmse/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace tmse {

void MeanScheduleSpec::validate() const {
  if (kind == MeanKind::Ouve && !(gamma > 0))
    throw std::invalid_argument("MeanScheduleSpec: gamma must be > 0");
  if (kind == MeanKind::Logistic && !(steepness_k > 0))
    throw std::invalid_argument("MeanScheduleSpec: steepness_k must be > 0");
}

void VarianceScheduleSpec::validate() const {
  if (!(sigma_max >= 0)) throw std::invalid_argument("VarianceScheduleSpec: sigma_max must be >= 0");
}

MeanKind mean_kind_from_string(const std::string& s) {
  if (s == "linear") return MeanKind::Linear;
  if (s == "ouve") return MeanKind::Ouve;
  if (s == "logistic") return MeanKind::Logistic;
  throw std::invalid_argument("unknown mean schedule '" + s + "'");
}

VarKind var_kind_from_string(const std::string& s) {
  if (s == "linear") return VarKind::Linear;
  if (s == "bridge") return VarKind::Bridge;
  if (s == "constant") return VarKind::Constant;
  throw std::invalid_argument("unknown variance schedule '" + s + "'");
}

std::string to_string(MeanKind k) {
  switch (k) {
    case MeanKind::Linear: return "linear";
    case MeanKind::Ouve: return "ouve";
    case MeanKind::Logistic: return "logistic";
  }
  return "?";
}

std::string to_string(VarKind k) {
  switch (k) {
    case VarKind::Linear: return "linear";
    case VarKind::Bridge: return "bridge";
    case VarKind::Constant: return "constant";
  }
  return "?";
}

double mean_mix(const MeanScheduleSpec& spec, double t) {
  spec.validate();
  switch (spec.kind) {
    case MeanKind::Linear:
      return t;
    case MeanKind::Ouve:
      return 1.0 - std::exp(-spec.gamma * t);
    case MeanKind::Logistic: {
      // exact zeros at t=0 and ones at t=1 by construction
      const double k = spec.steepness_k;
      const double ek2 = std::exp(0.5 * k);
      return ((1.0 + ek2) / (1.0 + std::exp(-k * (t - 0.5))) - 1.0) / (ek2 - 1.0);
    }
  }
  return 0;
}

double mean_mix_derivative(const MeanScheduleSpec& spec, double t) {
  spec.validate();
  switch (spec.kind) {
    case MeanKind::Linear:
      return 1.0;
    case MeanKind::Ouve:
      return spec.gamma * std::exp(-spec.gamma * t);
    case MeanKind::Logistic: {
      const double k = spec.steepness_k;
      const double ek2 = std::exp(0.5 * k);
      const double s = 1.0 / (1.0 + std::exp(-k * (t - 0.5)));  // logistic sigmoid
      return (1.0 + ek2) / (ek2 - 1.0) * k * s * (1.0 - s);
    }
  }
  return 0;
}

double mean_at(const MeanScheduleSpec& spec, double t, double x0, double x1) {
  return x0 + mean_mix(spec, t) * (x1 - x0);
}

double mean_derivative_at(const MeanScheduleSpec& spec, double t, double x0, double x1) {
  return mean_mix_derivative(spec, t) * (x1 - x0);
}

double sigma_at(const VarianceScheduleSpec& spec, double t) {
  spec.validate();
  switch (spec.kind) {
    case VarKind::Linear:
      return spec.sigma_max * t;
    case VarKind::Bridge:
      return spec.sigma_max * std::sqrt(std::max(t * (1.0 - t), 0.0));
    case VarKind::Constant:
      return spec.sigma_max;
  }
  return 0;
}

double sigma_derivative_at(const VarianceScheduleSpec& spec, double t) {
  spec.validate();
  switch (spec.kind) {
    case VarKind::Linear:
      return spec.sigma_max;
    case VarKind::Bridge: {
      if (t <= 0.0 || t >= 1.0)
        throw std::domain_error("sigma_derivative_at: bridge derivative unbounded at t in {0,1}");
      return spec.sigma_max * (1.0 - 2.0 * t) / (2.0 * std::sqrt(t * (1.0 - t)));
    }
    case VarKind::Constant:
      return 0.0;
  }
  return 0;
}

SnrCurve snr_trajectory(const MeanScheduleSpec& mean, const VarianceScheduleSpec& var,
                        double x0, double x1, const std::vector<double>& grid) {
  if (x0 == x1) throw std::invalid_argument("snr_trajectory: x0 must differ from x1");
  SnrCurve curve;
  curve.grid = grid;
  curve.snr_db.reserve(grid.size());
  const double diff2 = (x1 - x0) * (x1 - x0);
  for (double t : grid) {
    const double c = mean_mix(mean, t);
    const double sig = sigma_at(var, t);
    const double noise = c * c * diff2 + sig * sig;
    double db;
    if (noise < 1e-12)
      db = 120.0;
    else
      db = 10.0 * std::log10(x0 * x0 / noise);
    curve.snr_db.push_back(std::min(db, 120.0));
  }
  return curve;
}

}  // namespace tmse

#pragma once

#include <string>
#include <vector>

namespace tmse {

// Mean schedules interpolating x0 (t=0) toward x1 (t=1). All three are of
// the form mu_t = x0 + mix(t) * (x1 - x0); only the logistic and linear hit
// x1 exactly at t=1 (the OU schedule stops short by e^{-gamma}).
enum class MeanKind { Linear, Ouve, Logistic };

struct MeanScheduleSpec {
  MeanKind kind = MeanKind::Logistic;
  double gamma = 1.5;        // OU stiffness
  double steepness_k = 10.0; // logistic steepness

  void validate() const;
};

enum class VarKind { Linear, Bridge, Constant };

struct VarianceScheduleSpec {
  VarKind kind = VarKind::Bridge;
  double sigma_max = 0.5;

  void validate() const;
};

MeanKind mean_kind_from_string(const std::string& s);
VarKind var_kind_from_string(const std::string& s);
std::string to_string(MeanKind k);
std::string to_string(VarKind k);

// mix(t) with mix(0) = 0; mean_at = x0 + mix(t) * (x1 - x0)
double mean_mix(const MeanScheduleSpec& spec, double t);
double mean_mix_derivative(const MeanScheduleSpec& spec, double t);

double mean_at(const MeanScheduleSpec& spec, double t, double x0, double x1);
double mean_derivative_at(const MeanScheduleSpec& spec, double t, double x0, double x1);

double sigma_at(const VarianceScheduleSpec& spec, double t);
// Bridge derivative is unbounded at the endpoints; t in {0,1} throws.
double sigma_derivative_at(const VarianceScheduleSpec& spec, double t);

struct SnrCurve {
  std::vector<double> grid;
  std::vector<double> snr_db;
};

// SNR of the perturbed scalar pair: the mean drift c_t*(x1-x0) plus the
// Gaussian sigma_t count as noise against the clean power x0^2. Capped at
// +120 dB where the noise power underflows.
SnrCurve snr_trajectory(const MeanScheduleSpec& mean, const VarianceScheduleSpec& var,
                        double x0, double x1, const std::vector<double>& grid);

}  // namespace tmse

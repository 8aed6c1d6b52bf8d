#pragma once

#include "gfra/common.hpp"
#include "gfra/dps_bem.hpp"
#include "gfra/scenario.hpp"

namespace gfra {

/// Angular-domain channel taps indexed (bin_y, bin_z, m, u, n, l).
using ChannelEstimate = Tensor<Complex, 6>;

struct TrialResult {
  double nmse_db = 0.0;
  double nmse_linear = 0.0;
  double aer = 0.0;
  std::vector<int> truth;      // lambda_u
  std::vector<int> detected;   // lambda-hat_u
  std::vector<double> energies;
  int iterations_used = 0;
  double wall_time = 0.0;  // s
};

/// H(i, j, m, u, n, l) = sum_q b_q(mN + n) g_{i,j}[q U L + u L + l].
ChannelEstimate reconstruct(const std::vector<CVector>& coefficients, const DpsBasis& basis,
                            const SystemConfig& cfg);

/// Angular channel of the scenario itself (not its basis projection):
/// lambda_u h_u^m(n; l) times the two Dirichlet factors of the device angles.
ChannelEstimate true_angular_channel(const ScenarioInstance& scenario, const SystemConfig& cfg);

struct Detection {
  std::vector<int> active;
  std::vector<double> energies;
};

/// Per-device energy summed over bins, symbols, samples and taps, compared
/// against the threshold.
Detection detect(const ChannelEstimate& estimate, double threshold);
std::vector<int> detect_from_energies(std::span<const double> energies, double threshold);

double nmse_linear(const ChannelEstimate& truth, const ChannelEstimate& estimate);
/// 10 log10 of nmse_linear, floored at -200 dB.
double nmse_db(const ChannelEstimate& truth, const ChannelEstimate& estimate);
double to_db(double ratio);

double aer(std::span<const int> truth, std::span<const int> estimate);

/// Threshold minimizing the pooled empirical activity error over the trials.
/// Candidates are the midpoints between consecutive sorted energies plus one
/// point below the smallest and one above the largest; ties go to the larger
/// threshold.
double calibrate_threshold(std::span<const TrialResult> trials);

}  // namespace gfra

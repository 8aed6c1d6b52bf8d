#pragma once

#include "gfra/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gfra {

enum class ChannelModel { kTdl, kBemSubspace };
enum class AngleModel { kUniform, kOnGrid };
enum class NoiseDomain { kAngular, kSpace };
enum class ObservationPath { kBem, kPhysical };

// Denominator of the LMMSE output precision.
enum class Eta2Rule {
  kPosteriorTrace,  // E / sum over all E posterior eigenvalues
  kPrinted,         // MN / sum over the singular values only
};

// Prefactor of the residual/spectrum terms in the noise-variance EM update.
enum class NoiseEmNorm { kCoefficients, kObservations };

// Which extrinsic message parameterizes the MRF input likelihood.
enum class MrfInputSource { kBgExtrinsic, kLmmseExtrinsic };

struct SolverOptions {
  double alpha = 0.4;
  double beta = 0.4;
  int max_iterations = 50;   // K_it
  int mrf_iterations = 10;   // K_mrf
  double stop_tolerance = 1e-4;
  double damping = 1.0;
  double gamma1_init = 1e-2;
  bool mrf_enabled = true;
  bool em_enabled = true;
  Eta2Rule eta2_rule = Eta2Rule::kPosteriorTrace;
  NoiseEmNorm noise_em_norm = NoiseEmNorm::kCoefficients;
  MrfInputSource mrf_input = MrfInputSource::kBgExtrinsic;
  // Replaces the MRF output with a constant support probability (testing).
  std::optional<double> fixed_support_prior;
};

struct SystemConfig {
  int subcarriers = 32;  // N
  int symbols = 8;       // M
  int devices = 100;     // U
  int array_y = 4;       // Ny
  int array_z = 4;       // Nz
  int taps = 2;          // L
  int basis_order = 3;   // Q
  double subcarrier_spacing = 240e3;  // Hz
  double max_doppler = 30e3;          // Hz
  double activity_prob = 0.1;
  double snr_db = 10.0;
  double threshold = 30.0;  // detection energy threshold
  int paths_per_device = 4;
  double delay_spread = 30e-9;  // s
  std::uint64_t seed = 1;

  ChannelModel channel_model = ChannelModel::kTdl;
  AngleModel angle_model = AngleModel::kUniform;
  NoiseDomain noise_domain = NoiseDomain::kAngular;
  ObservationPath observation_path = ObservationPath::kBem;

  SolverOptions solver;

  double sampling_interval() const { return 1.0 / (subcarriers * subcarrier_spacing); }
  std::size_t block_length() const {
    return static_cast<std::size_t>(subcarriers) * static_cast<std::size_t>(symbols);
  }
  std::size_t coefficient_count() const {
    return static_cast<std::size_t>(basis_order) * static_cast<std::size_t>(taps) *
           static_cast<std::size_t>(devices);
  }
  std::size_t bin_count() const {
    return static_cast<std::size_t>(array_y) * static_cast<std::size_t>(array_z);
  }
};

struct PathParams {
  Complex gain;
  double delay = 0.0;    // s
  double doppler = 0.0;  // Hz
};

struct DeviceState {
  bool active = false;
  double azimuth = 0.0;    // [0, pi)
  double elevation = 0.0;  // [-pi/2, pi/2)
  std::vector<PathParams> paths;
};

struct ScenarioInstance {
  std::vector<DeviceState> devices;
  Tensor<Complex, 4> channel_taps;  // (u, m, n, l)
  std::uint64_t seed_used = 0;
};

/// Checks every structural invariant of the configuration and throws
/// std::invalid_argument on the first violation. Soft problems (basis order
/// below the Doppler rule of thumb) are appended to `warnings`, or written to
/// std::clog when no sink is given.
SystemConfig validate_config(const SystemConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// Smallest basis order covering the Doppler spread: ceil(2 M f_max / df) + 1.
int select_order(int symbols, double max_doppler, double subcarrier_spacing);

/// Channel taps from the multipath parameters with a sinc pulse:
/// h_u(mN+n; l) = sum_i a_i exp(j 2 pi nu_i (mN+n) Ts) sinc(l - tau_i / Ts).
Tensor<Complex, 4> compute_channel_taps(const SystemConfig& cfg,
                                         const std::vector<DeviceState>& devices);

ScenarioInstance sample_scenario(const SystemConfig& cfg, std::uint64_t seed);

std::string to_string(ChannelModel v);
std::string to_string(AngleModel v);
std::string to_string(NoiseDomain v);
std::string to_string(ObservationPath v);

}  // namespace gfra

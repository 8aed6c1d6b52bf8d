#include "gfra/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace gfra {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-300) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

[[noreturn]] void reject(const std::string& what) {
  throw std::invalid_argument("invalid config: " + what);
}

// Angles whose array response lands exactly on one angular bin:
// Nz/2 cos(phi) and Ny/2 sin(phi) sin(psi) are both integers.
void draw_on_grid_angles(const SystemConfig& cfg, Rng& rng, double& azimuth, double& elevation) {
  const double half_y = 0.5 * cfg.array_y;
  const double half_z = 0.5 * cfg.array_z;

  // cos(phi) = kz / half_z must lie in (-1, 1].
  std::vector<int> kz_choices;
  for (int k = -cfg.array_z; k <= cfg.array_z; ++k) {
    const double c = k / half_z;
    if (c > -1.0 && c <= 1.0) kz_choices.push_back(k);
  }
  std::uniform_int_distribution<std::size_t> pick_z(0, kz_choices.size() - 1);
  const int kz = kz_choices[pick_z(rng)];
  azimuth = std::acos(static_cast<double>(kz) / half_z);

  const double s = std::sin(azimuth);
  std::uniform_real_distribution<double> el(-0.5 * kPi, 0.5 * kPi);
  if (s * half_y < 1e-12) {
    elevation = el(rng);
    return;
  }
  // sin(psi) = ky / (half_y sin(phi)) must lie in [-1, 1).
  std::vector<int> ky_choices;
  for (int k = -cfg.array_y; k <= cfg.array_y; ++k) {
    const double sp = k / (half_y * s);
    if (sp >= -1.0 - 1e-12 && sp < 1.0 - 1e-12) ky_choices.push_back(k);
  }
  std::uniform_int_distribution<std::size_t> pick_y(0, ky_choices.size() - 1);
  const int ky = ky_choices[pick_y(rng)];
  elevation = std::asin(std::clamp(ky / (half_y * s), -1.0, 1.0));
}

}  // namespace

SystemConfig validate_config(const SystemConfig& cfg, std::vector<std::string>* warnings) {
  auto positive = [](int v, const char* name) {
    if (v < 1) reject(std::string(name) + " must be >= 1");
  };
  positive(cfg.subcarriers, "subcarriers");
  positive(cfg.symbols, "symbols");
  positive(cfg.devices, "devices");
  positive(cfg.array_y, "array_y");
  positive(cfg.array_z, "array_z");
  positive(cfg.taps, "taps");
  positive(cfg.basis_order, "basis_order");
  positive(cfg.paths_per_device, "paths_per_device");
  positive(cfg.solver.max_iterations, "solver.max_iterations");
  positive(cfg.solver.mrf_iterations, "solver.mrf_iterations");

  if (!(cfg.activity_prob >= 0.0 && cfg.activity_prob <= 1.0))
    reject("activity_prob must lie in [0, 1]");
  if (!(cfg.subcarrier_spacing > 0.0)) reject("subcarrier_spacing must be > 0");
  if (!(cfg.max_doppler >= 0.0)) reject("max_doppler must be >= 0");
  if (!(cfg.delay_spread >= 0.0)) reject("delay_spread must be >= 0");
  if (!(cfg.solver.stop_tolerance > 0.0)) reject("solver.stop_tolerance must be > 0");
  if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0))
    reject("solver.damping must lie in (0, 1]");
  if (!(cfg.solver.gamma1_init > 0.0)) reject("solver.gamma1_init must be > 0");
  if (!(cfg.threshold >= 0.0)) reject("threshold must be >= 0");
  if (!std::isfinite(cfg.snr_db)) reject("snr_db must be finite");

  const double normalized = 2.0 * cfg.max_doppler * cfg.sampling_interval();
  if (normalized >= 1.0) {
    std::ostringstream os;
    os << "2 f_max Ts = " << normalized << " must be < 1";
    reject(os.str());
  }
  if (static_cast<std::size_t>(cfg.basis_order) > cfg.block_length())
    reject("basis_order exceeds M*N");

  const int rule = select_order(cfg.symbols, cfg.max_doppler, cfg.subcarrier_spacing);
  if (cfg.basis_order < rule) {
    std::ostringstream os;
    os << "basis_order " << cfg.basis_order << " is below the Doppler rule ceil(2 M f_max / df) + 1 = "
       << rule;
    if (warnings)
      warnings->push_back(os.str());
    else
      std::clog << "warning: " << os.str() << '\n';
  }
  return cfg;
}

int select_order(int symbols, double max_doppler, double subcarrier_spacing) {
  if (!(subcarrier_spacing > 0.0))
    throw std::invalid_argument("select_order: subcarrier spacing must be > 0");
  const double ratio = 2.0 * symbols * max_doppler / subcarrier_spacing;
  // Guard against 2.0000000001 style rounding of exact integers.
  const double rounded = std::round(ratio);
  const double c = std::abs(ratio - rounded) < 1e-9 ? rounded : std::ceil(ratio);
  return static_cast<int>(c) + 1;
}

Tensor<Complex, 4> compute_channel_taps(const SystemConfig& cfg,
                                         const std::vector<DeviceState>& devices) {
  const std::size_t U = devices.size();
  const std::size_t M = cfg.symbols, N = cfg.subcarriers, L = cfg.taps;
  const double ts = cfg.sampling_interval();
  Tensor<Complex, 4> taps({U, M, N, L});
  for (std::size_t u = 0; u < U; ++u) {
    for (const auto& p : devices[u].paths) {
      std::vector<double> pulse(L);
      for (std::size_t l = 0; l < L; ++l) pulse[l] = sinc(static_cast<double>(l) - p.delay / ts);
      for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t n = 0; n < N; ++n) {
          const double t = static_cast<double>(m * N + n) * ts;
          const Complex rot = p.gain * std::polar(1.0, 2.0 * kPi * p.doppler * t);
          for (std::size_t l = 0; l < L; ++l) taps(u, m, n, l) += rot * pulse[l];
        }
      }
    }
  }
  return taps;
}

ScenarioInstance sample_scenario(const SystemConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kScenario);
  std::bernoulli_distribution active(cfg.activity_prob);
  std::uniform_real_distribution<double> az(0.0, kPi);
  std::uniform_real_distribution<double> el(-0.5 * kPi, 0.5 * kPi);
  std::uniform_real_distribution<double> delay(0.0, cfg.delay_spread);
  std::uniform_real_distribution<double> doppler(-cfg.max_doppler, cfg.max_doppler);

  ScenarioInstance sc;
  sc.seed_used = seed;
  sc.devices.resize(cfg.devices);
  for (auto& dev : sc.devices) {
    dev.active = active(rng);
    if (cfg.angle_model == AngleModel::kOnGrid) {
      draw_on_grid_angles(cfg, rng, dev.azimuth, dev.elevation);
    } else {
      dev.azimuth = az(rng);
      dev.elevation = el(rng);
    }

    dev.paths.resize(cfg.paths_per_device);
    double total = 0.0;
    std::vector<double> power(dev.paths.size());
    for (std::size_t i = 0; i < dev.paths.size(); ++i) {
      auto& p = dev.paths[i];
      p.delay = cfg.delay_spread > 0.0 ? delay(rng) : 0.0;
      p.doppler = cfg.max_doppler > 0.0 ? doppler(rng) : 0.0;
      // exponential power-delay profile with rms spread = delay_spread
      power[i] = cfg.delay_spread > 0.0 ? std::exp(-p.delay / cfg.delay_spread) : 1.0;
      total += power[i];
    }
    for (std::size_t i = 0; i < dev.paths.size(); ++i)
      dev.paths[i].gain = std::sqrt(power[i] / total) * complex_normal(rng);
  }
  sc.channel_taps = compute_channel_taps(cfg, sc.devices);
  return sc;
}

std::string to_string(ChannelModel v) { return v == ChannelModel::kTdl ? "tdl" : "bem_subspace"; }
std::string to_string(AngleModel v) { return v == AngleModel::kUniform ? "uniform" : "on_grid"; }
std::string to_string(NoiseDomain v) { return v == NoiseDomain::kAngular ? "angular" : "space"; }
std::string to_string(ObservationPath v) { return v == ObservationPath::kBem ? "bem" : "physical"; }

}  // namespace gfra

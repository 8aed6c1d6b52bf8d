#include "gfra/detection.hpp"

#include "gfra/channel_sim.hpp"

#include <algorithm>
#include <cmath>

namespace gfra {

ChannelEstimate reconstruct(const std::vector<CVector>& coefficients, const DpsBasis& basis,
                            const SystemConfig& cfg) {
  const std::size_t NY = cfg.array_y, NZ = cfg.array_z, M = cfg.symbols, U = cfg.devices,
                    N = cfg.subcarriers, L = cfg.taps, Q = cfg.basis_order;
  if (coefficients.size() != NY * NZ)
    throw std::invalid_argument("reconstruct: expected one coefficient vector per bin");
  if (basis.length() != M * N || basis.order() != Q)
    throw std::invalid_argument("reconstruct: basis does not match config");

  ChannelEstimate h({NY, NZ, M, U, N, L});
  for (std::size_t iy = 0; iy < NY; ++iy) {
    for (std::size_t iz = 0; iz < NZ; ++iz) {
      const CVector& g = coefficients[iy * NZ + iz];
      if (static_cast<std::size_t>(g.size()) != Q * U * L)
        throw std::invalid_argument("reconstruct: coefficient vector length mismatch");
      for (std::size_t u = 0; u < U; ++u)
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t q = 0; q < Q; ++q) {
            const Complex c = g(static_cast<Eigen::Index>((q * U + u) * L + l));
            if (c == Complex(0.0)) continue;
            for (std::size_t m = 0; m < M; ++m)
              for (std::size_t n = 0; n < N; ++n)
                h(iy, iz, m, u, n, l) +=
                    basis.vectors(static_cast<Eigen::Index>(m * N + n), static_cast<Eigen::Index>(q)) * c;
          }
    }
  }
  return h;
}

ChannelEstimate true_angular_channel(const ScenarioInstance& scenario, const SystemConfig& cfg) {
  const std::size_t NY = cfg.array_y, NZ = cfg.array_z, M = cfg.symbols, U = cfg.devices,
                    N = cfg.subcarriers, L = cfg.taps;
  const auto& taps = scenario.channel_taps;
  ChannelEstimate h({NY, NZ, M, U, N, L});
  for (std::size_t u = 0; u < U; ++u) {
    const auto& dev = scenario.devices[u];
    if (!dev.active) continue;
    for (std::size_t iy = 0; iy < NY; ++iy) {
      const Complex fy = dirichlet(NY, static_cast<double>(iy) - 0.5 * static_cast<double>(NY) *
                                                                   std::sin(dev.azimuth) *
                                                                   std::sin(dev.elevation));
      for (std::size_t iz = 0; iz < NZ; ++iz) {
        const Complex f =
            fy * dirichlet(NZ, static_cast<double>(iz) - 0.5 * static_cast<double>(NZ) * std::cos(dev.azimuth));
        for (std::size_t m = 0; m < M; ++m)
          for (std::size_t n = 0; n < N; ++n)
            for (std::size_t l = 0; l < L; ++l) h(iy, iz, m, u, n, l) = f * taps(u, m, n, l);
      }
    }
  }
  return h;
}

Detection detect(const ChannelEstimate& estimate, double threshold) {
  const std::size_t NY = estimate.dim(0), NZ = estimate.dim(1), M = estimate.dim(2),
                    U = estimate.dim(3), N = estimate.dim(4), L = estimate.dim(5);
  Detection d;
  d.energies.assign(U, 0.0);
  for (std::size_t iy = 0; iy < NY; ++iy)
    for (std::size_t iz = 0; iz < NZ; ++iz)
      for (std::size_t m = 0; m < M; ++m)
        for (std::size_t u = 0; u < U; ++u)
          for (std::size_t n = 0; n < N; ++n)
            for (std::size_t l = 0; l < L; ++l) d.energies[u] += std::norm(estimate(iy, iz, m, u, n, l));
  d.active = detect_from_energies(d.energies, threshold);
  return d;
}

std::vector<int> detect_from_energies(std::span<const double> energies, double threshold) {
  std::vector<int> out(energies.size());
  for (std::size_t u = 0; u < energies.size(); ++u) out[u] = energies[u] > threshold ? 1 : 0;
  return out;
}

double nmse_linear(const ChannelEstimate& truth, const ChannelEstimate& estimate) {
  if (truth.shape() != estimate.shape()) throw std::invalid_argument("nmse: shape mismatch");
  double err = 0.0, ref = 0.0;
  const auto t = truth.data();
  const auto e = estimate.data();
  for (std::size_t k = 0; k < t.size(); ++k) {
    err += std::norm(t[k] - e[k]);
    ref += std::norm(t[k]);
  }
  if (!(ref > 0.0)) throw std::invalid_argument("nmse: zero truth energy");
  return err / ref;
}

double to_db(double ratio) { return ratio > 0.0 ? std::max(10.0 * std::log10(ratio), -200.0) : -200.0; }

double nmse_db(const ChannelEstimate& truth, const ChannelEstimate& estimate) {
  return to_db(nmse_linear(truth, estimate));
}

double aer(std::span<const int> truth, std::span<const int> estimate) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("aer: length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t u = 0; u < truth.size(); ++u) wrong += truth[u] != estimate[u] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double calibrate_threshold(std::span<const TrialResult> trials) {
  struct Sample {
    double energy;
    int active;
  };
  std::vector<Sample> pool;
  for (const auto& t : trials) {
    if (t.energies.size() != t.truth.size())
      throw std::invalid_argument("calibrate_threshold: energies and truth differ in length");
    for (std::size_t u = 0; u < t.energies.size(); ++u) pool.push_back({t.energies[u], t.truth[u]});
  }
  if (pool.empty()) throw std::invalid_argument("calibrate_threshold: no calibration samples");
  std::sort(pool.begin(), pool.end(), [](const Sample& a, const Sample& b) { return a.energy < b.energy; });

  // Threshold below everything: all detected active, errors = number inactive.
  std::size_t errors = 0;
  for (const auto& s : pool) errors += s.active ? 0 : 1;
  std::size_t best_errors = errors;
  double best = pool.front().energy > 0.0 ? 0.5 * pool.front().energy : pool.front().energy - 1.0;

  // Moving the threshold above sample k flips it to "inactive".
  for (std::size_t k = 0; k < pool.size(); ++k) {
    errors += pool[k].active ? 1 : 0;
    errors -= pool[k].active ? 0 : 1;
    if (k + 1 < pool.size() && pool[k + 1].energy == pool[k].energy) continue;
    const double candidate = k + 1 < pool.size() ? 0.5 * (pool[k].energy + pool[k + 1].energy)
                                                 : 2.0 * pool[k].energy + 1.0;
    if (errors <= best_errors) {
      best_errors = errors;
      best = candidate;
    }
  }
  return best;
}

}  // namespace gfra

#include "gfra/measurement.hpp"

#include <Eigen/SVD>

namespace gfra {

namespace {

void check_dims(const DpsBasis& basis, const PilotSet& pilots, const SystemConfig& cfg) {
  const std::size_t U = cfg.devices, M = cfg.symbols, N = cfg.subcarriers;
  if (basis.length() != M * N)
    throw std::invalid_argument("assemble_gamma: basis length differs from M*N");
  if (basis.order() != static_cast<std::size_t>(cfg.basis_order))
    throw std::invalid_argument("assemble_gamma: basis order differs from config");
  if (pilots.time.shape() != std::array<std::size_t, 3>{U, M, N})
    throw std::invalid_argument("assemble_gamma: pilot dimensions do not match config");
}

// Coefficients g_q^{u,l} for every device and tap, laid out (u, l) -> Q-vector.
std::vector<CVector> projections(const ScenarioInstance& scenario, const DpsBasis& basis,
                                 const SystemConfig& cfg) {
  const std::size_t U = cfg.devices, M = cfg.symbols, N = cfg.subcarriers, L = cfg.taps;
  const auto& taps = scenario.channel_taps;
  if (taps.shape() != std::array<std::size_t, 4>{U, M, N, L})
    throw std::invalid_argument("true_sparse_vector: channel dimensions do not match config");
  std::vector<CVector> out(U * L);
  CVector h(static_cast<Eigen::Index>(M * N));
  for (std::size_t u = 0; u < U; ++u) {
    if (!scenario.devices[u].active) continue;
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t t = 0; t < M * N; ++t) h(t) = taps(u, t / N, t % N, l);
      out[u * L + l] = project_channel(h, basis);
    }
  }
  return out;
}

CVector assemble_bin(const std::vector<CVector>& proj, const ScenarioInstance& scenario,
                     const SystemConfig& cfg, std::size_t ay, std::size_t az) {
  const std::size_t U = cfg.devices, L = cfg.taps, Q = cfg.basis_order;
  CVector g = CVector::Zero(static_cast<Eigen::Index>(Q * U * L));
  for (std::size_t u = 0; u < U; ++u) {
    const auto& dev = scenario.devices[u];
    if (!dev.active) continue;
    const Complex gain =
        dirichlet(cfg.array_y, static_cast<double>(ay) - 0.5 * cfg.array_y * std::sin(dev.azimuth) *
                                                             std::sin(dev.elevation)) *
        dirichlet(cfg.array_z, static_cast<double>(az) - 0.5 * cfg.array_z * std::cos(dev.azimuth));
    for (std::size_t l = 0; l < L; ++l) {
      const CVector& p = proj[u * L + l];
      for (std::size_t q = 0; q < Q; ++q) g((q * U + u) * L + l) = p(q) * gain;
    }
  }
  return g;
}

}  // namespace

MeasurementModel assemble_gamma(const DpsBasis& basis, const PilotSet& pilots, const SystemConfig& cfg) {
  check_dims(basis, pilots, cfg);
  MeasurementModel model;
  model.symbols = cfg.symbols;
  model.subcarriers = cfg.subcarriers;
  model.devices = cfg.devices;
  model.taps = cfg.taps;
  model.order = cfg.basis_order;

  const std::size_t M = model.symbols, N = model.subcarriers, U = model.devices, L = model.taps,
                    Q = model.order;
  model.gamma.resize(static_cast<Eigen::Index>(M * N), static_cast<Eigen::Index>(Q * U * L));
  for (std::size_t q = 0; q < Q; ++q)
    for (std::size_t u = 0; u < U; ++u)
      for (std::size_t l = 0; l < L; ++l) {
        const auto col = static_cast<Eigen::Index>(model.column(q, u, l));
        for (std::size_t m = 0; m < M; ++m)
          for (std::size_t n = 0; n < N; ++n)
            model.gamma(static_cast<Eigen::Index>(m * N + n), col) =
                basis.vectors(static_cast<Eigen::Index>(m * N + n), static_cast<Eigen::Index>(q)) *
                pilots.time(u, m, (n + N - l % N) % N);
      }

  Eigen::BDCSVD<CMatrix> svd(model.gamma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("assemble_gamma: SVD failed");
  model.left = svd.matrixU();
  model.singular_values = svd.singularValues();
  model.right = svd.matrixV();
  return model;
}

CVector true_sparse_vector(const ScenarioInstance& scenario, const DpsBasis& basis,
                           const SystemConfig& cfg, std::size_t ay, std::size_t az) {
  return assemble_bin(projections(scenario, basis, cfg), scenario, cfg, ay, az);
}

std::vector<CVector> true_sparse_vectors(const ScenarioInstance& scenario, const DpsBasis& basis,
                                         const SystemConfig& cfg) {
  const auto proj = projections(scenario, basis, cfg);
  std::vector<CVector> out;
  out.reserve(cfg.bin_count());
  for (std::size_t ay = 0; ay < static_cast<std::size_t>(cfg.array_y); ++ay)
    for (std::size_t az = 0; az < static_cast<std::size_t>(cfg.array_z); ++az)
      out.push_back(assemble_bin(proj, scenario, cfg, ay, az));
  return out;
}

CVector forward(const MeasurementModel& model, const CVector& g, double noise_var, Rng& rng) {
  if (g.size() != model.gamma.cols()) throw std::invalid_argument("forward: length mismatch");
  CVector y = model.gamma * g;
  if (noise_var > 0.0)
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += complex_normal(rng, noise_var);
  return y;
}

}  // namespace gfra

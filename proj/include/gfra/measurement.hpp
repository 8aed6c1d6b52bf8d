#pragma once

#include "gfra/channel_sim.hpp"
#include "gfra/common.hpp"
#include "gfra/dps_bem.hpp"
#include "gfra/scenario.hpp"

namespace gfra {

/// Measurement matrix shared by every angular bin, with its economy SVD
/// Gamma = U diag(s) V^H (r = min(NM, E) factors).
///
/// Column e = q U L + u L + l holds b_q(mN+n) x_u^m((n - l) mod N) in row mN+n.
struct MeasurementModel {
  CMatrix gamma;          // NM x E
  CMatrix left;           // NM x r
  RVector singular_values;  // r, descending
  CMatrix right;          // E x r

  std::size_t symbols = 0, subcarriers = 0, devices = 0, taps = 0, order = 0;

  std::size_t rows() const { return static_cast<std::size_t>(gamma.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(gamma.cols()); }
  std::size_t rank_bound() const { return static_cast<std::size_t>(singular_values.size()); }
  std::size_t column(std::size_t q, std::size_t u, std::size_t l) const {
    return (q * devices + u) * taps + l;
  }
};

MeasurementModel assemble_gamma(const DpsBasis& basis, const PilotSet& pilots, const SystemConfig& cfg);

/// Ground-truth sparse vector of angular bin (ay, az): per (q, u, l) the
/// projection coefficient of the tap trajectory, gated by activity and scaled
/// by the two Dirichlet factors of the device's angles.
CVector true_sparse_vector(const ScenarioInstance& scenario, const DpsBasis& basis,
                           const SystemConfig& cfg, std::size_t ay, std::size_t az);

/// All bins in row-major (ay, az) order.
std::vector<CVector> true_sparse_vectors(const ScenarioInstance& scenario, const DpsBasis& basis,
                                         const SystemConfig& cfg);

/// Gamma g plus i.i.d. complex Gaussian noise of variance noise_var.
CVector forward(const MeasurementModel& model, const CVector& g, double noise_var, Rng& rng);

}  // namespace gfra

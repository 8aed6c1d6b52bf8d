#pragma once

#include "gfra/common.hpp"
#include "gfra/scenario.hpp"

#include <filesystem>

namespace gfra {

/// Discrete prolate spheroidal basis spanning one block of M*N samples.
/// Columns are orthonormal, real-valued, ordered by descending eigenvalue of
/// the prolate kernel.
struct DpsBasis {
  RMatrix vectors;      // MN x Q
  RVector eigenvalues;  // Q, descending
  double max_doppler = 0.0;
  double sampling_interval = 0.0;

  std::size_t length() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t order() const { return static_cast<std::size_t>(vectors.cols()); }
};

/// Prolate kernel: sin(2 pi (a-b) f_max Ts) / (pi (a-b)), diagonal 2 f_max Ts.
RMatrix build_theta(std::size_t block_length, double max_doppler, double sampling_interval);

/// Q dominant eigenvectors of theta. The sign of each vector is fixed so that
/// its first non-negligible entry is positive. A zero-Doppler kernel yields
/// the constant vector and requires Q = 1.
DpsBasis dps_basis(const RMatrix& theta, std::size_t order, double max_doppler,
                   double sampling_interval);

/// Basis for a configuration. Results are memoized in-process, keyed by the
/// exact bits of (MN, f_max Ts, Q).
const DpsBasis& basis_for(const SystemConfig& cfg);

CVector project_channel(const CVector& h, const DpsBasis& basis);
CVector expand_coefficients(const CVector& g, const DpsBasis& basis);

/// 10 log10(|h - B B^H h|^2 / |h|^2), floored at -200 dB.
double bem_error_db(const CVector& h, const DpsBasis& basis);

/// Replaces every channel tap trajectory by its projection onto the basis.
void project_scenario(ScenarioInstance& scenario, const DpsBasis& basis);

// Binary basis cache, little-endian:
//   char[8] "GFRADPS1" | u64 MN | u64 Q | f64 f_max | f64 Ts |
//   f64 eigenvalues[Q] | f64 vectors[MN*Q] (column-major)
void save_basis(const DpsBasis& basis, const std::filesystem::path& path);
DpsBasis load_basis(const std::filesystem::path& path);

}  // namespace gfra

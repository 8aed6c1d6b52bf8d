#pragma once

#include "gfra/common.hpp"
#include "gfra/scenario.hpp"

#include <filesystem>

namespace gfra {

/// Pilot symbols per device and OFDM symbol. `time` is the unitary inverse
/// DFT of `freq` along the subcarrier axis:
///   x(n) = N^{-1/2} sum_k X(k) exp(j 2 pi k n / N).
struct PilotSet {
  Tensor<Complex, 3> freq;  // (u, m, k)
  Tensor<Complex, 3> time;  // (u, m, n)
};

/// Received angular-domain samples, (a_y, a_z, m, n), plus the noise variance
/// that was injected.
struct AngularObservation {
  Tensor<Complex, 4> y;
  double noise_var = 0.0;
};

/// QPSK pilots {+-1 +-j}/sqrt(2), i.i.d. over devices, symbols and subcarriers.
PilotSet gen_pilots(const SystemConfig& cfg, Rng& rng);

/// Builds the time-domain counterpart of explicit frequency-domain pilots.
PilotSet pilots_from_frequency(Tensor<Complex, 3> freq);

/// Planar array response exp(j pi n_z cos(az)) exp(j pi n_y sin(az) sin(el)),
/// indexed (n_y, n_z).
CMatrix array_response(double azimuth, double elevation, std::size_t ny, std::size_t nz);

/// Normalized Dirichlet kernel (1/N) sum_{i<N} exp(-j 2 pi x i / N).
Complex dirichlet(std::size_t n, double x);

/// Space-domain samples (n_y, n_z, m, n) of the tapped delay line model with
/// per-symbol circular convolution. When noise_var > 0, i.i.d. complex
/// Gaussian noise of that variance is added to every antenna sample.
Tensor<Complex, 4> received_space(const ScenarioInstance& scenario, const PilotSet& pilots,
                                  const SystemConfig& cfg, double noise_var, Rng& rng);

/// 2-D DFT across the array with a 1/(Ny Nz) forward scale, so that an array
/// response maps onto products of Dirichlet kernels.
Tensor<Complex, 4> angular_transform(const Tensor<Complex, 4>& space);

/// Noise variance that realizes `snr_db` for the given per-bin sparse vectors:
/// sigma^2 = sum |Gamma g|^2 / (10^{snr/10} N M Ny Nz).
double calibrate_noise(double snr_db, const CMatrix& gamma, const std::vector<CVector>& sparse,
                       const SystemConfig& cfg);

/// Per-bin observation vector (index m N + n) of an angular tensor.
CVector bin_vector(const Tensor<Complex, 4>& angular, std::size_t ay, std::size_t az);

// Tensor dump, little-endian:
//   char[8] "GFRATNS1" | u64 rank | u64 dims[rank] | f64 (re, im) pairs in
//   row-major order, last index fastest.
void write_tensor(const Tensor<Complex, 4>& t, const std::filesystem::path& path);
Tensor<Complex, 4> read_tensor4(const std::filesystem::path& path);

}  // namespace gfra

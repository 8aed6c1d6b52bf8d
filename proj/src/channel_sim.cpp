#include "gfra/channel_sim.hpp"

#include "gfra/binary_io.hpp"

#include <cmath>
#include <fstream>

namespace gfra {

PilotSet gen_pilots(const SystemConfig& cfg, Rng& rng) {
  const std::size_t U = cfg.devices, M = cfg.symbols, N = cfg.subcarriers;
  const double a = 1.0 / std::sqrt(2.0);
  std::uniform_int_distribution<int> bit(0, 1);
  Tensor<Complex, 3> freq({U, M, N});
  for (auto& v : freq.data()) {
    const double re = bit(rng) ? a : -a;
    const double im = bit(rng) ? a : -a;
    v = {re, im};
  }
  return pilots_from_frequency(std::move(freq));
}

PilotSet pilots_from_frequency(Tensor<Complex, 3> freq) {
  const std::size_t U = freq.dim(0), M = freq.dim(1), N = freq.dim(2);
  Tensor<Complex, 3> time({U, M, N});
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  std::vector<Complex> twiddle(N);
  for (std::size_t k = 0; k < N; ++k)
    twiddle[k] = std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(N));
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t n = 0; n < N; ++n) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < N; ++k) acc += freq(u, m, k) * twiddle[(k * n) % N];
        time(u, m, n) = acc * scale;
      }
    }
  }
  return PilotSet{std::move(freq), std::move(time)};
}

CMatrix array_response(double azimuth, double elevation, std::size_t ny, std::size_t nz) {
  CMatrix eps(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nz));
  const double cz = std::cos(azimuth);
  const double cy = std::sin(azimuth) * std::sin(elevation);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t iz = 0; iz < nz; ++iz)
      eps(iy, iz) = std::polar(1.0, kPi * (static_cast<double>(iz) * cz + static_cast<double>(iy) * cy));
  return eps;
}

Complex dirichlet(std::size_t n, double x) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += std::polar(1.0, -2.0 * kPi * x * static_cast<double>(i) / static_cast<double>(n));
  return acc / static_cast<double>(n);
}

Tensor<Complex, 4> received_space(const ScenarioInstance& scenario, const PilotSet& pilots,
                                  const SystemConfig& cfg, double noise_var, Rng& rng) {
  const std::size_t U = cfg.devices, M = cfg.symbols, N = cfg.subcarriers, L = cfg.taps;
  const std::size_t NY = cfg.array_y, NZ = cfg.array_z;
  const auto& taps = scenario.channel_taps;
  if (scenario.devices.size() != U || taps.shape() != std::array<std::size_t, 4>{U, M, N, L})
    throw std::invalid_argument("received_space: scenario dimensions do not match config");
  if (pilots.time.shape() != std::array<std::size_t, 3>{U, M, N})
    throw std::invalid_argument("received_space: pilot dimensions do not match config");

  Tensor<Complex, 4> y({NY, NZ, M, N});
  std::vector<Complex> s(M * N);
  for (std::size_t u = 0; u < U; ++u) {
    const auto& dev = scenario.devices[u];
    if (!dev.active) continue;
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t n = 0; n < N; ++n) {
        Complex acc = 0.0;
        for (std::size_t l = 0; l < L; ++l)
          acc += taps(u, m, n, l) * pilots.time(u, m, (n + N - l % N) % N);
        s[m * N + n] = acc;
      }
    }
    const CMatrix eps = array_response(dev.azimuth, dev.elevation, NY, NZ);
    for (std::size_t iy = 0; iy < NY; ++iy)
      for (std::size_t iz = 0; iz < NZ; ++iz) {
        const Complex e = eps(iy, iz);
        for (std::size_t m = 0; m < M; ++m)
          for (std::size_t n = 0; n < N; ++n) y(iy, iz, m, n) += e * s[m * N + n];
      }
  }
  if (noise_var > 0.0)
    for (auto& v : y.data()) v += complex_normal(rng, noise_var);
  return y;
}

Tensor<Complex, 4> angular_transform(const Tensor<Complex, 4>& space) {
  const std::size_t NY = space.dim(0), NZ = space.dim(1), M = space.dim(2), N = space.dim(3);
  Tensor<Complex, 4> out(space.shape());
  const double scale = 1.0 / static_cast<double>(NY * NZ);
  for (std::size_t ay = 0; ay < NY; ++ay) {
    for (std::size_t az = 0; az < NZ; ++az) {
      for (std::size_t iy = 0; iy < NY; ++iy) {
        for (std::size_t iz = 0; iz < NZ; ++iz) {
          const double phase = -2.0 * kPi *
                               (static_cast<double>((ay * iy) % NY) / static_cast<double>(NY) +
                                static_cast<double>((az * iz) % NZ) / static_cast<double>(NZ));
          const Complex w = std::polar(scale, phase);
          for (std::size_t m = 0; m < M; ++m)
            for (std::size_t n = 0; n < N; ++n) out(ay, az, m, n) += w * space(iy, iz, m, n);
        }
      }
    }
  }
  return out;
}

double calibrate_noise(double snr_db, const CMatrix& gamma, const std::vector<CVector>& sparse,
                       const SystemConfig& cfg) {
  double energy = 0.0;
  for (const auto& g : sparse) {
    if (g.size() != gamma.cols()) throw std::invalid_argument("calibrate_noise: length mismatch");
    energy += (gamma * g).squaredNorm();
  }
  if (!(energy > 0.0)) throw std::runtime_error("calibrate_noise: SNR undefined (zero signal energy)");
  const double denom = std::pow(10.0, snr_db / 10.0) * static_cast<double>(cfg.block_length()) *
                       static_cast<double>(cfg.bin_count());
  return energy / denom;
}

CVector bin_vector(const Tensor<Complex, 4>& angular, std::size_t ay, std::size_t az) {
  const std::size_t M = angular.dim(2), N = angular.dim(3);
  CVector v(static_cast<Eigen::Index>(M * N));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < N; ++n) v(m * N + n) = angular(ay, az, m, n);
  return v;
}

void write_tensor(const Tensor<Complex, 4>& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write tensor " + path.string());
  out.write("GFRATNS1", 8);
  binary::write_le<std::uint64_t>(out, 4);
  for (std::size_t k = 0; k < 4; ++k) binary::write_le<std::uint64_t>(out, t.dim(k));
  for (const auto& v : t.data()) {
    binary::write_le<double>(out, v.real());
    binary::write_le<double>(out, v.imag());
  }
}

Tensor<Complex, 4> read_tensor4(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tensor " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "GFRATNS1")
    throw std::runtime_error("tensor " + path.string() + ": bad magic");
  if (binary::read_le<std::uint64_t>(in) != 4)
    throw std::runtime_error("tensor " + path.string() + ": expected rank 4");
  std::array<std::size_t, 4> shape{};
  for (auto& d : shape) d = binary::read_le<std::uint64_t>(in);
  Tensor<Complex, 4> t(shape);
  for (auto& v : t.data()) {
    const double re = binary::read_le<double>(in);
    const double im = binary::read_le<double>(in);
    v = {re, im};
  }
  return t;
}

}  // namespace gfra

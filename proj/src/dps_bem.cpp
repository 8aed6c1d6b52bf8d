#include "gfra/dps_bem.hpp"

#include "gfra/binary_io.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace gfra {

RMatrix build_theta(std::size_t block_length, double max_doppler, double sampling_interval) {
  const double w = max_doppler * sampling_interval;
  const auto n = static_cast<Eigen::Index>(block_length);
  RMatrix theta(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    theta(a, a) = 2.0 * w;
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double d = static_cast<double>(a - b);
      const double v = std::sin(2.0 * kPi * d * w) / (kPi * d);
      theta(a, b) = v;
      theta(b, a) = v;
    }
  }
  return theta;
}

DpsBasis dps_basis(const RMatrix& theta, std::size_t order, double max_doppler,
                   double sampling_interval) {
  const auto n = theta.rows();
  if (theta.cols() != n) throw std::invalid_argument("dps_basis: kernel must be square");
  if (order < 1 || static_cast<Eigen::Index>(order) > n)
    throw std::invalid_argument("dps_basis: order must lie in [1, MN]");

  DpsBasis basis;
  basis.max_doppler = max_doppler;
  basis.sampling_interval = sampling_interval;

  if (max_doppler == 0.0) {
    if (order != 1)
      throw std::invalid_argument("dps_basis: a static channel (f_max = 0) needs order 1");
    basis.vectors = RMatrix::Constant(n, 1, 1.0 / std::sqrt(static_cast<double>(n)));
    basis.eigenvalues = RVector::Zero(1);
    return basis;
  }

  Eigen::SelfAdjointEigenSolver<RMatrix> eig(theta);
  if (eig.info() != Eigen::Success) {
    std::ostringstream os;
    os << "dps_basis: eigensolver failed (MN=" << n << ", f_max=" << max_doppler
       << ", Ts=" << sampling_interval << ", Q=" << order << ")";
    throw std::runtime_error(os.str());
  }

  // Eigen sorts ascending; take the tail in reverse.
  const auto q = static_cast<Eigen::Index>(order);
  basis.vectors.resize(n, q);
  basis.eigenvalues.resize(q);
  for (Eigen::Index k = 0; k < q; ++k) {
    const Eigen::Index src = n - 1 - k;
    basis.eigenvalues(k) = eig.eigenvalues()(src);
    auto v = eig.eigenvectors().col(src);
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-8 * scale) {
        basis.vectors.col(k) = v(i) < 0.0 ? RVector(-v) : RVector(v);
        break;
      }
    }
  }
  return basis;
}

const DpsBasis& basis_for(const SystemConfig& cfg) {
  using Key = std::tuple<std::size_t, std::uint64_t, std::uint64_t, int>;
  static std::mutex mu;
  static std::map<Key, DpsBasis> cache;

  const double ts = cfg.sampling_interval();
  const Key key{cfg.block_length(), std::bit_cast<std::uint64_t>(cfg.max_doppler),
                std::bit_cast<std::uint64_t>(ts), cfg.basis_order};
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const RMatrix theta = build_theta(cfg.block_length(), cfg.max_doppler, ts);
    it = cache.emplace(key, dps_basis(theta, cfg.basis_order, cfg.max_doppler, ts)).first;
  }
  return it->second;
}

CVector project_channel(const CVector& h, const DpsBasis& basis) {
  if (static_cast<std::size_t>(h.size()) != basis.length())
    throw std::invalid_argument("project_channel: length mismatch");
  return basis.vectors.transpose().cast<Complex>() * h;
}

CVector expand_coefficients(const CVector& g, const DpsBasis& basis) {
  if (static_cast<std::size_t>(g.size()) != basis.order())
    throw std::invalid_argument("expand_coefficients: length mismatch");
  return basis.vectors.cast<Complex>() * g;
}

double bem_error_db(const CVector& h, const DpsBasis& basis) {
  const double energy = h.squaredNorm();
  if (energy == 0.0) throw std::invalid_argument("bem_error_db: zero channel");
  const CVector residual = h - expand_coefficients(project_channel(h, basis), basis);
  const double ratio = residual.squaredNorm() / energy;
  return std::max(10.0 * std::log10(ratio), -200.0);
}

void project_scenario(ScenarioInstance& scenario, const DpsBasis& basis) {
  auto& taps = scenario.channel_taps;
  const std::size_t U = taps.dim(0), M = taps.dim(1), N = taps.dim(2), L = taps.dim(3);
  if (M * N != basis.length()) throw std::invalid_argument("project_scenario: basis length mismatch");
  CVector h(static_cast<Eigen::Index>(M * N));
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t t = 0; t < M * N; ++t) h(t) = taps(u, t / N, t % N, l);
      const CVector p = expand_coefficients(project_channel(h, basis), basis);
      for (std::size_t t = 0; t < M * N; ++t) taps(u, t / N, t % N, l) = p(t);
    }
  }
}

void save_basis(const DpsBasis& basis, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write basis cache " + path.string());
  out.write("GFRADPS1", 8);
  binary::write_le<std::uint64_t>(out, basis.length());
  binary::write_le<std::uint64_t>(out, basis.order());
  binary::write_le<double>(out, basis.max_doppler);
  binary::write_le<double>(out, basis.sampling_interval);
  for (Eigen::Index k = 0; k < basis.eigenvalues.size(); ++k)
    binary::write_le<double>(out, basis.eigenvalues(k));
  for (Eigen::Index k = 0; k < basis.vectors.size(); ++k)
    binary::write_le<double>(out, basis.vectors.data()[k]);
}

DpsBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open basis cache " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "GFRADPS1")
    throw std::runtime_error("basis cache " + path.string() + ": bad magic");
  const auto n = static_cast<Eigen::Index>(binary::read_le<std::uint64_t>(in));
  const auto q = static_cast<Eigen::Index>(binary::read_le<std::uint64_t>(in));
  DpsBasis basis;
  basis.max_doppler = binary::read_le<double>(in);
  basis.sampling_interval = binary::read_le<double>(in);
  basis.eigenvalues.resize(q);
  for (Eigen::Index k = 0; k < q; ++k) basis.eigenvalues(k) = binary::read_le<double>(in);
  basis.vectors.resize(n, q);
  for (Eigen::Index k = 0; k < n * q; ++k) basis.vectors.data()[k] = binary::read_le<double>(in);
  return basis;
}

}  // namespace gfra

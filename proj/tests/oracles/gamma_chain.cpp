#include "oracles.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace oracle {

namespace {

CMatrix unitary_dft(std::size_t n) {
  CMatrix f(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      f(a, b) = std::polar(1.0 / std::sqrt(double(n)), -2.0 * gfra::kPi * double(a * b) / double(n));
  return f;
}

}  // namespace

CMatrix gamma_chain(const gfra::DpsBasis& basis, const gfra::PilotSet& pilots, std::size_t taps) {
  const std::size_t U = pilots.freq.dim(0), M = pilots.freq.dim(1), N = pilots.freq.dim(2);
  const std::size_t Q = basis.order(), L = taps;
  const CMatrix F = unitary_dft(N);
  const CMatrix first_taps = CMatrix::Identity(N, L);
  const CMatrix stack = Eigen::kroneckerProduct(CMatrix::Ones(M, 1), first_taps);  // MN x L

  CMatrix gamma = CMatrix::Zero(M * N, Q * U * L);
  for (std::size_t u = 0; u < U; ++u) {
    CMatrix circulant = CMatrix::Zero(M * N, M * N);
    for (std::size_t m = 0; m < M; ++m) {
      CVector x(N);
      for (std::size_t k = 0; k < N; ++k) x(k) = std::sqrt(double(N)) * pilots.freq(u, m, k);
      circulant.block(m * N, m * N, N, N) = F.adjoint() * x.asDiagonal() * F;
    }
    const CMatrix per_tap = circulant * stack;
    for (std::size_t q = 0; q < Q; ++q) {
      const CVector b = basis.vectors.col(q).cast<Complex>();
      gamma.middleCols((q * U + u) * L, L) = b.asDiagonal() * per_tap;
    }
  }
  return gamma;
}

}  // namespace oracle

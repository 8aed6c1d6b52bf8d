#pragma once

#include "gfra/scenario.hpp"

#include <doctest.h>

#include <cmath>

namespace testing {

// One-bin instance used across modules: N=8, M=2, U=2, L=2, Q=2 (E=8, NM=16).
inline gfra::SystemConfig tiny_config() {
  gfra::SystemConfig c;
  c.subcarriers = 8;
  c.symbols = 2;
  c.devices = 2;
  c.array_y = 1;
  c.array_z = 1;
  c.taps = 2;
  c.basis_order = 2;
  c.subcarrier_spacing = 15e3;
  c.max_doppler = 3e3;
  c.activity_prob = 1.0;
  c.delay_spread = 1e-6;
  c.paths_per_device = 3;
  c.threshold = 0.0;
  return c;
}

inline double rel_err(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double ref = std::max(b.norm(), 1e-300);
  return (a - b).norm() / ref;
}

inline gfra::CVector random_cvector(Eigen::Index n, gfra::Rng& rng, double var = 1.0) {
  gfra::CVector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = gfra::complex_normal(rng, var);
  return v;
}

inline gfra::CMatrix random_cmatrix(Eigen::Index r, Eigen::Index c, gfra::Rng& rng) {
  gfra::CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = gfra::complex_normal(rng);
  return m;
}

}  // namespace testing

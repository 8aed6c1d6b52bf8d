#include "gfra/dps_bem.hpp"
#include "gfra/experiment.hpp"
#include "helpers.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace gfra;

TEST_SUITE("dps_bem") {

namespace {

const double kFig3Ts = 1.0 / (32 * 240e3);

CVector column(const DpsBasis& b, Eigen::Index q) { return b.vectors.col(q).cast<Complex>(); }

}  // namespace

TEST_CASE("prolate kernel entries") {
  const RMatrix theta = build_theta(256, 30e3, kFig3Ts);
  for (Eigen::Index a = 0; a < 256; ++a) CHECK(theta(a, a) == doctest::Approx(7.8125e-3).epsilon(1e-12));
  CHECK(theta.trace() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK((theta - theta.transpose()).norm() == 0.0);
  const double w = 30e3 * kFig3Ts;
  CHECK(theta(3, 7) == doctest::Approx(std::sin(2 * kPi * -4 * w) / (kPi * -4)).epsilon(1e-14));
  CHECK(build_theta(16, 0.0, 1e-6).norm() == 0.0);
}

TEST_CASE("fig3 basis is orthonormal with descending eigenvalues in (0, 1)") {
  const DpsBasis b = dps_basis(build_theta(256, 30e3, kFig3Ts), 3, 30e3, kFig3Ts);
  CHECK((b.vectors.transpose() * b.vectors - RMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index q = 0; q < 3; ++q) {
    CHECK(b.eigenvalues(q) > 0.0);
    CHECK(b.eigenvalues(q) < 1.0);
    if (q > 0) CHECK(b.eigenvalues(q) <= b.eigenvalues(q - 1));
  }
  // Slepian concentration values for a time-bandwidth product MN f_max Ts = 1.
  CHECK(b.eigenvalues(0) == doctest::Approx(0.9805).epsilon(1e-3));
  CHECK(b.eigenvalues(1) == doctest::Approx(0.7505).epsilon(2e-3));
}

TEST_CASE("basis vectors are eigenvectors of the kernel") {
  const RMatrix theta = build_theta(128, 4e3, 1.0 / (64 * 15e3));
  const DpsBasis b = dps_basis(theta, 3, 4e3, 1.0 / (64 * 15e3));
  for (Eigen::Index q = 0; q < 3; ++q)
    CHECK((theta * b.vectors.col(q) - b.eigenvalues(q) * b.vectors.col(q)).norm() < 1e-10);
}

TEST_CASE("sign convention: first non-negligible entry is positive") {
  const DpsBasis b = dps_basis(build_theta(64, 1e3, 1e-5), 5, 1e3, 1e-5);
  for (Eigen::Index q = 0; q < 5; ++q) {
    const auto v = b.vectors.col(q);
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (std::abs(v(k)) > 1e-8 * scale) {
        CHECK(v(k) > 0.0);
        break;
      }
  }
}

TEST_CASE("static channel gives the constant vector") {
  const DpsBasis b = dps_basis(build_theta(16, 0.0, 1e-6), 1, 0.0, 1e-6);
  REQUIRE(b.order() == 1);
  for (Eigen::Index k = 0; k < 16; ++k) CHECK(b.vectors(k, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(dps_basis(build_theta(16, 0.0, 1e-6), 2, 0.0, 1e-6), std::invalid_argument);
}

TEST_CASE("order bounds") {
  const RMatrix theta = build_theta(8, 1e3, 1e-5);
  CHECK_THROWS_AS(dps_basis(theta, 0, 1e3, 1e-5), std::invalid_argument);
  CHECK_THROWS_AS(dps_basis(theta, 9, 1e3, 1e-5), std::invalid_argument);
}

TEST_CASE("complete basis reconstructs exactly") {
  const std::size_t n = 16;
  const DpsBasis b = dps_basis(build_theta(n, 2e3, 1e-5), n, 2e3, 1e-5);
  CHECK((b.vectors.transpose() * b.vectors - RMatrix::Identity(n, n)).norm() < 1e-10);
  Rng rng(2);
  const CVector h = testing::random_cvector(n, rng);
  CHECK(bem_error_db(h, b) < -180.0);
  CHECK((expand_coefficients(project_channel(h, b), b) - h).norm() < 1e-12);
}

TEST_CASE("eigenvalue sum equals the kernel trace") {
  const double ts = 1.0 / (64 * 15e3);
  const DpsBasis full = dps_basis(build_theta(128, 4e3, ts), 128, 4e3, ts);
  CHECK(full.eigenvalues.sum() == doctest::Approx(128 * 2 * 4e3 * ts).epsilon(1e-8));
}

TEST_CASE("fig2 spectrum concentration") {
  const double ts = 1.0 / (64 * 15e3);
  const RMatrix theta = build_theta(128, 4e3, ts);
  const DpsBasis b = dps_basis(theta, 3, 4e3, ts);
  CHECK(b.eigenvalues.sum() >= 0.95 * theta.trace());
}

TEST_CASE("projection examples") {
  const DpsBasis b = dps_basis(build_theta(64, 1e3, 1e-5), 4, 1e3, 1e-5);
  const CVector b0 = column(b, 0), b1 = column(b, 1);

  CVector g = project_channel(b0, b);
  CHECK(std::abs(g(0) - 1.0) < 1e-12);
  CHECK(g.tail(3).norm() < 1e-12);

  g = project_channel(Complex(2.0) * b0 + Complex(3.0) * b1, b);
  CHECK(std::abs(g(0) - 2.0) < 1e-12);
  CHECK(std::abs(g(1) - 3.0) < 1e-12);
  CHECK(g.tail(2).norm() < 1e-12);

  Rng rng(3);
  CVector h = testing::random_cvector(64, rng);
  const CVector perp = h - expand_coefficients(project_channel(h, b), b);
  CHECK(project_channel(perp, b).norm() < 1e-12);
  CHECK(bem_error_db(perp, b) == doctest::Approx(0.0).epsilon(1e-10));

  CHECK(bem_error_db(Complex(0.5, 1.0) * b1, b) == -200.0);
  CHECK_THROWS_AS(bem_error_db(CVector::Zero(64), b), std::invalid_argument);
  CHECK_THROWS_AS(project_channel(CVector::Zero(63), b), std::invalid_argument);
  CHECK_THROWS_AS(expand_coefficients(CVector::Zero(3), b), std::invalid_argument);
}

TEST_CASE("projection is idempotent and error is monotone in Q") {
  const double ts = kFig3Ts;
  const RMatrix theta = build_theta(256, 30e3, ts);
  Rng rng(17);
  const CVector h = testing::random_cvector(256, rng);
  double previous = 1.0;
  for (std::size_t q = 1; q <= 8; ++q) {
    const DpsBasis b = dps_basis(theta, q, 30e3, ts);
    const CVector g = project_channel(h, b);
    CHECK((project_channel(expand_coefficients(g, b), b) - g).norm() < 1e-12);
    const double err = bem_error_db(h, b);
    CHECK(err <= previous + 1e-12);
    previous = err;
  }
}

TEST_CASE("BEM error of sampled fig3 channels") {
  // Monte-Carlo band frozen from an independent run: median about -19 dB at
  // Q = 3 (eigenvalues 0.98, 0.75, 0.24); one more basis vector gets below
  // -25 dB.
  SystemConfig c = preset("fig3");
  c.devices = 100;
  c.activity_prob = 1.0;
  const auto sc = sample_scenario(c, 2024);
  const DpsBasis& q3 = basis_for(c);
  SystemConfig c4 = c;
  c4.basis_order = 4;
  const DpsBasis& q4 = basis_for(c4);
  std::vector<double> err3, err4;
  for (std::size_t u = 0; u < 100; ++u) {
    CVector h(256);
    for (std::size_t t = 0; t < 256; ++t) h(t) = sc.channel_taps(u, t / 32, t % 32, 0);
    err3.push_back(bem_error_db(h, q3));
    err4.push_back(bem_error_db(h, q4));
  }
  std::nth_element(err3.begin(), err3.begin() + 50, err3.end());
  std::nth_element(err4.begin(), err4.begin() + 50, err4.end());
  MESSAGE("median BEM error Q=3: " << err3[50] << " dB, Q=4: " << err4[50] << " dB");
  CHECK(err3[50] < -16.0);
  CHECK(err3[50] > -23.0);
  CHECK(err4[50] <= -25.0);
}

TEST_CASE("basis_for memoizes") {
  const SystemConfig c = preset("fig2");
  const DpsBasis& a = basis_for(c);
  const DpsBasis& b = basis_for(c);
  CHECK(&a == &b);
  CHECK(a.order() == 3);
  CHECK(a.length() == 128);
}

TEST_CASE("basis cache file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "gfra_basis_test.bin";
  const DpsBasis b = dps_basis(build_theta(32, 2e3, 1e-5), 3, 2e3, 1e-5);
  save_basis(b, path);
  const DpsBasis back = load_basis(path);
  CHECK(back.vectors == b.vectors);
  CHECK(back.eigenvalues == b.eigenvalues);
  CHECK(back.max_doppler == b.max_doppler);
  CHECK(back.sampling_interval == b.sampling_interval);

  std::ifstream raw(path, std::ios::binary);
  char magic[8];
  raw.read(magic, 8);
  CHECK(std::string(magic, 8) == "GFRADPS1");
  raw.close();

  std::ofstream(path, std::ios::binary) << "NOTABASIS-------";
  CHECK_THROWS(load_basis(path));
  std::filesystem::remove(path);
}

TEST_CASE("project_scenario puts every trajectory in the subspace") {
  SystemConfig c = testing::tiny_config();
  auto sc = sample_scenario(c, 1);
  const DpsBasis& b = basis_for(c);
  project_scenario(sc, b);
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t l = 0; l < 2; ++l) {
      CVector h(16);
      for (std::size_t t = 0; t < 16; ++t) h(t) = sc.channel_taps(u, t / 8, t % 8, l);
      if (h.norm() > 0.0) CHECK(bem_error_db(h, b) < -150.0);
    }
}

}  // TEST_SUITE

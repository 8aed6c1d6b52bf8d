#include "gfra/solver.hpp"
#include "helpers.hpp"

using namespace gfra;

TEST_SUITE("mrf") {

namespace {

// Exact extrinsic marginal P(s_k = +1) on a small grid with spins in {-1, +1},
// unary exp(-alpha s), pairwise exp(beta s s') on the 4-connected edges, and
// every node except k weighted by its input probability.
double brute_force_output(std::size_t rows, std::size_t cols, const std::vector<double>& input,
                          double alpha, double beta, std::size_t k) {
  const std::size_t n = rows * cols;
  double on = 0.0, off = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    auto spin = [&](std::size_t i) { return (mask >> i) & 1u ? 1.0 : -1.0; };
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      w *= std::exp(-alpha * spin(i));
      if (i != k) w *= spin(i) > 0 ? input[i] : 1.0 - input[i];
    }
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t i = r * cols + c;
        if (c + 1 < cols) w *= std::exp(beta * spin(i) * spin(i + 1));
        if (r + 1 < rows) w *= std::exp(beta * spin(i) * spin(i + cols));
      }
    (spin(k) > 0 ? on : off) += w;
  }
  return on / (on + off);
}

}  // namespace

TEST_CASE("output closed forms") {
  const std::array<double, 4> half{0.5, 0.5, 0.5, 0.5};
  CHECK(mrf_output_value(0.4, half) == doctest::Approx(0.3100).epsilon(1e-4));
  CHECK(mrf_output_value(0.4, half) ==
        doctest::Approx(std::exp(-0.4) / (std::exp(-0.4) + std::exp(0.4))).epsilon(1e-15));
  CHECK(mrf_output_value(0.0, half) == 0.5);
  const std::array<double, 4> ones{1.0, 1.0, 1.0, 1.0};
  CHECK(mrf_output_value(0.4, ones) == 1.0);
  CHECK(mrf_output_value(-3.0, ones) == 1.0);
  const std::array<double, 4> clash{1.0, 0.0, 0.5, 0.5};
  bool degenerate = false;
  CHECK(mrf_output_value(0.4, clash, &degenerate) == 0.5);
  CHECK(degenerate);
}

TEST_CASE("beta = 0 makes every message exactly one half") {
  MrfField f(4, 4, 3, 0.4, 0.0);
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t e = 0; e < 3; ++e)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) f.input(e, i, j) = u(rng);
  f.sweep(1);
  for (std::size_t e = 0; e < 3; ++e)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        for (int d = 0; d < 4; ++d) CHECK(f.message(Direction(d), e, i, j) == 0.5);
        CHECK(f.output(e, i, j) == std::exp(-0.4) / (std::exp(-0.4) + std::exp(0.4)));
      }
}

TEST_CASE("alpha = beta = 0 with uniform inputs is a fixed point") {
  MrfField f(3, 4, 2, 0.0, 0.0);
  f.sweep(5);
  for (std::size_t e = 0; e < 2; ++e)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        for (int d = 0; d < 4; ++d) CHECK(f.message(Direction(d), e, i, j) == 0.5);
}

TEST_CASE("a single node has no neighbours") {
  MrfField f(1, 1, 4, 0.4, 0.4);
  for (std::size_t e = 0; e < 4; ++e) f.input(e, 0, 0) = 0.9;
  f.sweep(10);
  for (std::size_t e = 0; e < 4; ++e) {
    for (int d = 0; d < 4; ++d) CHECK(f.message(Direction(d), e, 0, 0) == 0.5);
    CHECK(f.output(e, 0, 0) == doctest::Approx(0.3100).epsilon(1e-4));
  }
}

TEST_CASE("messages stay probabilities") {
  MrfField f(4, 4, 2, 0.4, 0.4);
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t e = 0; e < 2; ++e)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) f.input(e, i, j) = u(rng) < 0.2 ? double(u(rng) < 0.5) : u(rng);
  for (int round = 0; round < 12; ++round) {
    f.sweep(1);
    for (std::size_t e = 0; e < 2; ++e)
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          for (int d = 0; d < 4; ++d) {
            const double m = f.message(Direction(d), e, i, j);
            CHECK(m >= 0.0);
            CHECK(m <= 1.0);
          }
          const double o = f.output(e, i, j);
          CHECK(o >= 0.0);
          CHECK(o <= 1.0);
        }
  }
}

TEST_CASE("neighbour convention") {
  // Only node (1, 1) is informative; its message reaches (1, 2) from the
  // bottom, (1, 0) from the top, (2, 1) from the left and (0, 1) from the right.
  MrfField f(3, 3, 1, 0.0, 0.8);
  f.input(0, 1, 1) = 0.95;
  f.sweep(1);
  CHECK(f.message(Direction::kBottom, 0, 1, 2) > 0.5);
  CHECK(f.message(Direction::kTop, 0, 1, 0) > 0.5);
  CHECK(f.message(Direction::kLeft, 0, 2, 1) > 0.5);
  CHECK(f.message(Direction::kRight, 0, 0, 1) > 0.5);
  CHECK(f.message(Direction::kTop, 0, 1, 2) == 0.5);   // missing neighbour
  CHECK(f.message(Direction::kLeft, 0, 0, 1) == 0.5);  // missing neighbour
  CHECK(f.message(Direction::kTop, 0, 2, 2) == doctest::Approx(0.5));
}

TEST_CASE("belief propagation is exact on trees") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (const auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 5}, {4, 1}, {1, 2}}) {
    MrfField f(rows, cols, 1, 0.4, 0.6);
    std::vector<double> input(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) f.input(0, i, j) = input[i * cols + j] = u(rng);
    f.sweep(8);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        CHECK(f.output(0, i, j) ==
              doctest::Approx(brute_force_output(rows, cols, input, 0.4, 0.6, i * cols + j)).epsilon(1e-12));
  }
}

TEST_CASE("loopy propagation on a 2x2 grid stays close to the exact marginal") {
  MrfField f(2, 2, 1, 0.4, 0.4);
  const std::vector<double> input{0.9, 0.2, 0.6, 0.7};
  for (std::size_t k = 0; k < 4; ++k) f.input(0, k / 2, k % 2) = input[k];
  f.sweep(30);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(f.output(0, k / 2, k % 2) - brute_force_output(2, 2, input, 0.4, 0.4, k)) < 0.05);
}

TEST_CASE("reset restores uniform messages") {
  MrfField f(2, 3, 1, 0.4, 0.4);
  f.input(0, 0, 0) = 0.99;
  f.sweep(3);
  f.reset_messages();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (int d = 0; d < 4; ++d) CHECK(f.message(Direction(d), 0, i, j) == 0.5);
}

}  // TEST_SUITE

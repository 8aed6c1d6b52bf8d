#include "gfra/solver.hpp"

#include <cmath>

namespace gfra {

namespace {

constexpr std::array<Direction, 4> kDirections{Direction::kTop, Direction::kBottom, Direction::kLeft,
                                               Direction::kRight};

Direction opposite(Direction d) {
  switch (d) {
    case Direction::kTop: return Direction::kBottom;
    case Direction::kBottom: return Direction::kTop;
    case Direction::kLeft: return Direction::kRight;
    case Direction::kRight: return Direction::kLeft;
  }
  return d;
}

}  // namespace

MrfField::MrfField(std::size_t rows, std::size_t cols, std::size_t coefficients, double alpha,
                   double beta)
    : rows_(rows), cols_(cols), coefficients_(coefficients), alpha_(alpha), beta_(beta) {
  input_.assign(rows * cols * coefficients, 0.5);
  reset_messages();
}

void MrfField::reset_messages() {
  for (auto& m : messages_) m.assign(rows_ * cols_ * coefficients_, 0.5);
}

void MrfField::sweep(int rounds, SolverFlags* flags) {
  const double up = std::exp(-alpha_ + beta_);
  const double down = std::exp(alpha_ - beta_);
  const double coupling = std::exp(beta_) + std::exp(-beta_);
  const double ea_neg = std::exp(-alpha_);
  const double ea_pos = std::exp(alpha_);

  std::array<std::vector<double>, 4> next = messages_;
  for (int round = 0; round < rounds; ++round) {
    for (std::size_t e = 0; e < coefficients_; ++e) {
      for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
          for (const Direction d : kDirections) {
            // Neighbour that sends into (i, j) from direction d.
            std::size_t ni = i, nj = j;
            bool exists = true;
            switch (d) {
              case Direction::kTop: exists = j + 1 < cols_; nj = j + 1; break;
              case Direction::kBottom: exists = j > 0; nj = j - 1; break;
              case Direction::kLeft: exists = i > 0; ni = i - 1; break;
              case Direction::kRight: exists = i + 1 < rows_; ni = i + 1; break;
            }
            double& out = next[static_cast<std::size_t>(d)][index(e, i, j)];
            if (!exists) {
              out = 0.5;
              continue;
            }
            const std::size_t at = index(e, ni, nj);
            const Direction back = opposite(d);
            double on = input_[at];
            double off = 1.0 - input_[at];
            for (const Direction k : kDirections) {
              if (k == back) continue;
              const double p = messages_[static_cast<std::size_t>(k)][at];
              on *= p;
              off *= 1.0 - p;
            }
            const double den = coupling * (on * ea_neg + off * ea_pos);
            if (!(den > 0.0)) {
              out = 0.5;
              if (flags) ++flags->mrf_degenerate;
              continue;
            }
            out = (on * up + off * down) / den;
          }
        }
      }
    }
    messages_.swap(next);
  }
}

double mrf_output_value(double alpha, std::span<const double, 4> incoming, bool* degenerate) {
  double on = std::exp(-alpha);
  double off = std::exp(alpha);
  for (const double p : incoming) {
    on *= p;
    off *= 1.0 - p;
  }
  if (!(on + off > 0.0)) {
    if (degenerate) *degenerate = true;
    return 0.5;
  }
  return on / (on + off);
}

double MrfField::output(std::size_t e, std::size_t i, std::size_t j, SolverFlags* flags) const {
  const std::size_t at = index(e, i, j);
  const std::array<double, 4> incoming{messages_[0][at], messages_[1][at], messages_[2][at],
                                       messages_[3][at]};
  bool degenerate = false;
  const double v = mrf_output_value(alpha_, incoming, &degenerate);
  if (degenerate && flags) ++flags->mrf_degenerate;
  return v;
}

}  // namespace gfra

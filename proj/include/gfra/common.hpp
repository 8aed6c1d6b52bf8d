#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfra {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

using Rng = std::mt19937_64;

// Independent random streams inside one trial. Each stream gets its own
// generator so that, for example, changing the noise level does not perturb
// the scenario draw.
enum class Stream : std::uint64_t {
  kScenario = 1,
  kPilots = 2,
  kNoise = 3,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

// Circularly symmetric complex Gaussian sample with E|z|^2 = variance.
inline Complex complex_normal(Rng& rng, double variance = 1.0) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

/// Dense row-major tensor with a fixed rank. Index order follows the order of
/// the shape array, last index fastest.
template <typename T, std::size_t Rank>
class Tensor {
 public:
  using Shape = std::array<std::size_t, Rank>;

  Tensor() { shape_.fill(0); }

  explicit Tensor(Shape shape, T fill = T{}) : shape_(shape) {
    const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                          std::multiplies<>());
    data_.assign(n, fill);
  }

  template <typename... Idx>
  T& operator()(Idx... idx) {
    return data_[offset(idx...)];
  }
  template <typename... Idx>
  const T& operator()(Idx... idx) const {
    return data_[offset(idx...)];
  }

  const Shape& shape() const { return shape_; }
  std::size_t dim(std::size_t k) const { return shape_[k]; }
  std::size_t size() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool operator==(const Tensor& other) const = default;

 private:
  template <typename... Idx>
  std::size_t offset(Idx... idx) const {
    static_assert(sizeof...(Idx) == Rank, "wrong number of indices");
    const std::array<std::size_t, Rank> index{static_cast<std::size_t>(idx)...};
    std::size_t off = 0;
    for (std::size_t k = 0; k < Rank; ++k) off = off * shape_[k] + index[k];
    return off;
  }

  Shape shape_;
  std::vector<T> data_;
};

}  // namespace gfra

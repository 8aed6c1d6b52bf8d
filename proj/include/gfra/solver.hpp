#pragma once

#include "gfra/common.hpp"
#include "gfra/measurement.hpp"
#include "gfra/scenario.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace gfra {

inline constexpr double kPrecisionMin = 1e-8;
inline constexpr double kPrecisionMax = 1e12;
inline constexpr double kHyperFloor = 1e-12;
inline constexpr double kSupportFloor = 1e-12;

/// Hyperparameters of one angular bin: noise variance and the slab mean and
/// variance of the Bernoulli-Gaussian prior.
struct BinHyper {
  double noise_var = 1.0;
  Complex mean = 0.0;
  double variance = 1.0;
};

/// Iterate of one angular bin.
struct BinState {
  CVector r1;
  double gamma1 = 1e-2;
  CVector r2;
  double gamma2 = 1.0;
  CVector g1, g2;
  double eta1 = 1.0;
  double eta2 = 1.0;
  RVector support;       // posterior support probabilities
  CVector slab_mean;     // posterior slab means
  double slab_variance = 1.0;  // posterior slab variance (common to all entries)

  static BinState initial(std::size_t coefficients, double gamma1);
};

/// Observation of one bin with the projections that the SVD-form updates reuse.
struct BinData {
  CVector y;
  CVector left_y;          // U^H y
  double out_of_span = 0;  // |y - U U^H y|^2

  static BinData make(const CVector& y, const MeasurementModel& model);
};

/// Counts of numerical guard activations during a run.
struct SolverFlags {
  std::size_t support_mean_clipped = 0;  // <pi> underflow in the BG precision
  std::size_t precision_clipped = 0;     // extrinsic precision outside bounds
  std::size_t em_skipped = 0;            // sum of pi underflow in EM
  std::size_t mrf_degenerate = 0;        // 0/0 in an MRF message
};

struct Extrinsic {
  CVector r;
  double gamma;
};

/// gamma' = eta - gamma, r' = (eta g - gamma r) / gamma', with gamma' clipped
/// into [kPrecisionMin, kPrecisionMax].
Extrinsic extrinsic(const CVector& g, double eta, const CVector& r, double gamma,
                    SolverFlags* flags = nullptr);

/// log CN(0; mean, var) = -log(pi var) - |mean|^2 / var.
double log_cn_zero(Complex mean, double var);

/// Bernoulli-Gaussian denoiser. Reads r1, gamma1 and the MRF support prior;
/// writes support, slab_mean, slab_variance, g1 and eta1.
void bg_denoise(BinState& state, const BinHyper& hyper, std::span<const double> support_prior,
                SolverFlags* flags = nullptr);

/// Full posterior variance of every coefficient after bg_denoise.
RVector bg_posterior_variance(const BinState& state);

/// LMMSE denoiser through the cached SVD. Reads r2, gamma2; writes g2, eta2.
void lmmse_denoise(BinState& state, const BinHyper& hyper, const BinData& data,
                   const MeasurementModel& model, Eta2Rule rule);

/// Probability that coefficient e is in the support given a Gaussian message
/// CN(r, 1/gamma) and the slab (mean, variance); log-domain evaluation.
double support_likelihood(Complex r, double gamma, Complex mean, double variance);

/// EM update of (noise_var, mean, variance) after a full denoiser pass.
BinHyper em_update(const BinState& state, const BinHyper& hyper, const BinData& data,
                   const MeasurementModel& model, NoiseEmNorm norm, SolverFlags* flags = nullptr);

enum class Direction { kTop = 0, kBottom = 1, kLeft = 2, kRight = 3 };

/// Support MRF on the Ny x Nz angular grid, one independent grid per
/// coefficient index. Neighbours of (i, j): top (i, j+1), bottom (i, j-1),
/// left (i-1, j), right (i+1, j). Messages to missing neighbours stay at 0.5.
class MrfField {
 public:
  MrfField(std::size_t rows, std::size_t cols, std::size_t coefficients, double alpha, double beta);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t coefficients() const { return coefficients_; }

  /// Input probability pi_{q->s} of coefficient e at node (i, j).
  double& input(std::size_t e, std::size_t i, std::size_t j) { return input_[index(e, i, j)]; }
  double input(std::size_t e, std::size_t i, std::size_t j) const { return input_[index(e, i, j)]; }

  /// Message into node (i, j) from its neighbour in direction d.
  double message(Direction d, std::size_t e, std::size_t i, std::size_t j) const {
    return messages_[static_cast<std::size_t>(d)][index(e, i, j)];
  }

  /// Synchronous message-passing rounds.
  void sweep(int rounds, SolverFlags* flags = nullptr);

  /// pi_{s->q} for node (i, j) of coefficient e.
  double output(std::size_t e, std::size_t i, std::size_t j, SolverFlags* flags = nullptr) const;

  void reset_messages();

 private:
  std::size_t index(std::size_t e, std::size_t i, std::size_t j) const {
    return (e * rows_ + i) * cols_ + j;
  }

  std::size_t rows_, cols_, coefficients_;
  double alpha_, beta_;
  std::vector<double> input_;
  std::array<std::vector<double>, 4> messages_;
};

/// Closed form of the MRF output for given incoming messages.
double mrf_output_value(double alpha, std::span<const double, 4> incoming, bool* degenerate = nullptr);

struct SolverResult {
  std::vector<CVector> estimates;     // g1 per bin, row-major (ay, az)
  std::vector<BinHyper> hyper;        // final hyperparameters per bin
  std::vector<double> residual_trace; // sum |g1^{k} - g1^{k-1}|^2 per iteration
  int iterations = 0;
  bool converged = false;
  SolverFlags flags;
};

/// Initial hyperparameters of a bin from its observation energy.
BinHyper initial_hyper(const BinData& data, const MeasurementModel& model, double support_prior);

/// Joint estimation over all angular bins (EM-MRF-VAMP). `observations`
/// holds one NM-vector per bin in row-major (ay, az) order. When `diagnostics`
/// is non-null a CSV row per (iteration, bin) is written to it.
SolverResult run_solver(const std::vector<CVector>& observations, const MeasurementModel& model,
                        const SystemConfig& cfg, std::ostream* diagnostics = nullptr);

}  // namespace gfra

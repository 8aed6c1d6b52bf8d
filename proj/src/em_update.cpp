#include "gfra/solver.hpp"

#include <algorithm>

namespace gfra {

BinHyper em_update(const BinState& s, const BinHyper& hyper, const BinData& data,
                   const MeasurementModel& model, NoiseEmNorm norm, SolverFlags* flags) {
  const RVector& sv = model.singular_values;
  const auto r = sv.size();

  // |y - Gamma r2|^2 = |y - U U^H y|^2 + |U^H y - S V^H r2|^2
  const CVector w = model.right.adjoint() * s.r2;
  double residual = data.out_of_span;
  double spectrum = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    residual += std::norm(data.left_y(k) - sv(k) * w(k));
    const double s2 = sv(k) * sv(k);
    spectrum += s2 / (s2 / hyper.noise_var + s.gamma2);
  }
  const double denom = norm == NoiseEmNorm::kCoefficients ? static_cast<double>(model.cols())
                                                          : static_cast<double>(model.rows());

  BinHyper next = hyper;
  next.noise_var = std::max((residual + spectrum) / denom, kHyperFloor);

  const double total = s.support.sum();
  if (!(total > kSupportFloor)) {
    if (flags) ++flags->em_skipped;
    return next;
  }
  Complex mean = 0.0;
  double spread = 0.0;
  for (Eigen::Index e = 0; e < s.support.size(); ++e) {
    const double pi = s.support(e);
    mean += pi * s.slab_mean(e);
    spread += pi * (std::norm(s.slab_mean(e) - hyper.mean) + s.slab_variance);
  }
  next.mean = mean / total;
  next.variance = std::max(spread / total, kHyperFloor);
  return next;
}

BinHyper initial_hyper(const BinData& data, const MeasurementModel& model, double support_prior) {
  constexpr double kInitialSnr = 100.0;
  const double energy = data.y.squaredNorm();
  const auto rows = static_cast<double>(model.rows());
  BinHyper h;
  h.noise_var = std::max(energy / (rows * (1.0 + kInitialSnr)), kHyperFloor);
  h.mean = 0.0;
  const double gram = model.singular_values.squaredNorm();
  const double signal = std::max(energy - rows * h.noise_var, 0.0);
  h.variance = std::max(signal / (gram * std::max(support_prior, kSupportFloor)), kHyperFloor);
  return h;
}

}  // namespace gfra

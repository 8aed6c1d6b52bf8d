#include "gfra/solver.hpp"

#include <algorithm>

namespace gfra {

BinData BinData::make(const CVector& y, const MeasurementModel& model) {
  if (y.size() != model.gamma.rows()) throw std::invalid_argument("BinData: observation length mismatch");
  BinData d;
  d.y = y;
  d.left_y = model.left.adjoint() * y;
  d.out_of_span = std::max(0.0, y.squaredNorm() - d.left_y.squaredNorm());
  return d;
}

void lmmse_denoise(BinState& s, const BinHyper& hyper, const BinData& data,
                   const MeasurementModel& model, Eta2Rule rule) {
  const RVector& sv = model.singular_values;
  const auto r = sv.size();
  const double inv_noise = 1.0 / hyper.noise_var;
  const double g2 = s.gamma2;

  // On span(V): (s^2/sigma^2 + gamma2)^{-1} (s (U^H y)/sigma^2 + gamma2 V^H r2);
  // off span(V) the estimate keeps r2.
  const CVector w = model.right.adjoint() * s.r2;
  CVector coef(r);
  double trace = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    const double snr = sv(k) * sv(k) * inv_noise;
    const double denom = snr + g2;
    coef(k) = (sv(k) * inv_noise * data.left_y(k) + g2 * w(k)) / denom - w(k);
    trace += 1.0 / denom;
  }
  s.g2 = s.r2 + model.right * coef;

  const auto E = static_cast<double>(model.cols());
  double eta;
  if (rule == Eta2Rule::kPosteriorTrace) {
    eta = E / (trace + (E - static_cast<double>(r)) / g2);
  } else {
    eta = static_cast<double>(model.rows()) / trace;
  }
  s.eta2 = std::clamp(eta, kPrecisionMin, kPrecisionMax);
}

}  // namespace gfra

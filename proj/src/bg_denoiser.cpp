#include "gfra/solver.hpp"

#include <algorithm>
#include <cmath>

namespace gfra {

BinState BinState::initial(std::size_t coefficients, double gamma1) {
  const auto n = static_cast<Eigen::Index>(coefficients);
  BinState s;
  s.r1 = CVector::Zero(n);
  s.gamma1 = gamma1;
  s.r2 = CVector::Zero(n);
  s.g1 = CVector::Zero(n);
  s.g2 = CVector::Zero(n);
  s.support = RVector::Zero(n);
  s.slab_mean = CVector::Zero(n);
  return s;
}

double log_cn_zero(Complex mean, double var) { return -std::log(kPi * var) - std::norm(mean) / var; }

Extrinsic extrinsic(const CVector& g, double eta, const CVector& r, double gamma, SolverFlags* flags) {
  double out = eta - gamma;
  if (!(out >= kPrecisionMin) || out > kPrecisionMax) {
    out = std::clamp(std::isnan(out) ? kPrecisionMin : out, kPrecisionMin, kPrecisionMax);
    if (flags) ++flags->precision_clipped;
  }
  return {(eta * g - gamma * r) / out, out};
}

void bg_denoise(BinState& s, const BinHyper& hyper, std::span<const double> support_prior,
                SolverFlags* flags) {
  const auto n = s.r1.size();
  if (static_cast<Eigen::Index>(support_prior.size()) != n)
    throw std::invalid_argument("bg_denoise: support prior length mismatch");

  const double prec = s.gamma1 + 1.0 / hyper.variance;
  const double slab_var = 1.0 / prec;
  const double var_spike = 1.0 / s.gamma1;
  const double var_slab = var_spike + hyper.variance;

  s.support.resize(n);
  s.slab_mean.resize(n);
  s.g1.resize(n);
  s.slab_variance = slab_var;
  double mean_support = 0.0;
  for (Eigen::Index e = 0; e < n; ++e) {
    const double prior = support_prior[static_cast<std::size_t>(e)];
    const Complex r = s.r1(e);
    double pi;
    if (prior <= 0.0) {
      pi = 0.0;
    } else if (prior >= 1.0) {
      pi = 1.0;
    } else {
      // log of (1 - p) CN(0; r, 1/gamma) / (p CN(0; r - mu, 1/gamma + phi))
      const double llr = std::log1p(-prior) + log_cn_zero(r, var_spike) - std::log(prior) -
                         log_cn_zero(r - hyper.mean, var_slab);
      if (llr > 0.0) {
        const double t = std::exp(-llr);
        pi = t / (1.0 + t);
      } else {
        pi = 1.0 / (1.0 + std::exp(llr));
      }
    }
    const Complex mu = (s.gamma1 * r + hyper.mean / hyper.variance) * slab_var;
    s.support(e) = pi;
    s.slab_mean(e) = mu;
    s.g1(e) = pi * mu;
    mean_support += pi;
  }
  mean_support /= static_cast<double>(std::max<Eigen::Index>(n, 1));
  if (mean_support < kSupportFloor) {
    mean_support = kSupportFloor;
    if (flags) ++flags->support_mean_clipped;
  }
  s.eta1 = std::clamp(prec / mean_support, kPrecisionMin, kPrecisionMax);
}

RVector bg_posterior_variance(const BinState& s) {
  RVector v(s.support.size());
  for (Eigen::Index e = 0; e < v.size(); ++e) {
    const double pi = s.support(e);
    const double m2 = std::norm(s.slab_mean(e));
    v(e) = pi * (s.slab_variance + m2) - pi * pi * m2;
  }
  return v;
}

double support_likelihood(Complex r, double gamma, Complex mean, double variance) {
  const double var_spike = 1.0 / gamma;
  const double llr = log_cn_zero(r, var_spike) - log_cn_zero(r - mean, var_spike + variance);
  if (llr > 0.0) {
    const double t = std::exp(-llr);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(llr));
}

}  // namespace gfra

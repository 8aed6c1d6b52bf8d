#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace oracle {

namespace {

struct AxisMoments {
  double m0, m1, m2;  // integrals of f, x f, x^2 f
};

// f(x) = N(x; prior_mean, prior_var) N(obs; x, noise_var) on one real axis.
AxisMoments axis_moments(double obs, double noise_var, double prior_mean, double prior_var) {
  using boost::math::quadrature::gauss_kronrod;
  const double prec = 1.0 / noise_var + 1.0 / prior_var;
  const double centre = (obs / noise_var + prior_mean / prior_var) / prec;
  const double width = 30.0 / std::sqrt(prec);
  auto density = [&](double x) {
    const double a = (x - prior_mean) * (x - prior_mean) / prior_var;
    const double b = (obs - x) * (obs - x) / noise_var;
    return std::exp(-0.5 * (a + b)) / (2.0 * gfra::kPi * std::sqrt(prior_var * noise_var));
  };
  const double lo = centre - width, hi = centre + width;
  AxisMoments m{};
  m.m0 = gauss_kronrod<double, 61>::integrate(density, lo, hi, 15, 1e-14);
  m.m1 = gauss_kronrod<double, 61>::integrate([&](double x) { return x * density(x); }, lo, hi, 15, 1e-14);
  m.m2 = gauss_kronrod<double, 61>::integrate([&](double x) { return x * x * density(x); }, lo, hi, 15,
                                               1e-14);
  return m;
}

}  // namespace

BgMoments bg_posterior_quadrature(Complex r, double gamma, double p, Complex mu, double phi) {
  // A circular complex Gaussian of variance v splits into two real Gaussians
  // of variance v/2.
  const AxisMoments re = axis_moments(r.real(), 0.5 / gamma, mu.real(), 0.5 * phi);
  const AxisMoments im = axis_moments(r.imag(), 0.5 / gamma, mu.imag(), 0.5 * phi);

  const double slab = p * re.m0 * im.m0;
  const double spike = (1.0 - p) * gamma / gfra::kPi * std::exp(-gamma * std::norm(r));
  const double z = slab + spike;
  const Complex first = p * Complex(re.m1 * im.m0, re.m0 * im.m1) / z;
  const double second = p * (re.m2 * im.m0 + re.m0 * im.m2) / z;
  return {first, second - std::norm(first)};
}

}  // namespace oracle

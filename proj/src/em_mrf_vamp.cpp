#include "gfra/solver.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace gfra {

namespace {

void check_finite(const BinState& s, const BinHyper& h, int iteration, std::size_t ay, std::size_t az) {
  const bool ok = std::isfinite(s.gamma1) && std::isfinite(s.gamma2) && std::isfinite(s.eta1) &&
                  std::isfinite(s.eta2) && s.r1.allFinite() && s.r2.allFinite() && s.g1.allFinite() &&
                  s.g2.allFinite() && std::isfinite(h.noise_var) && std::isfinite(h.variance) &&
                  std::isfinite(h.mean.real()) && std::isfinite(h.mean.imag());
  if (!ok) {
    std::ostringstream os;
    os << "run_solver: non-finite state at iteration " << iteration << ", bin (" << ay << ", " << az
       << ")";
    throw std::runtime_error(os.str());
  }
}

void damp(CVector& current, const CVector& update, double rho) {
  if (rho >= 1.0) {
    current = update;
  } else {
    current = rho * update + (1.0 - rho) * current;
  }
}

double damp(double current, double update, double rho) {
  return rho >= 1.0 ? update : rho * update + (1.0 - rho) * current;
}

}  // namespace

SolverResult run_solver(const std::vector<CVector>& observations, const MeasurementModel& model,
                        const SystemConfig& cfg, std::ostream* diagnostics) {
  const SolverOptions& opt = cfg.solver;
  const std::size_t rows = cfg.array_y, cols = cfg.array_z;
  const std::size_t bins = rows * cols;
  const std::size_t E = model.cols();
  if (observations.size() != bins)
    throw std::invalid_argument("run_solver: expected one observation per angular bin");
  if (E != cfg.coefficient_count())
    throw std::invalid_argument("run_solver: measurement model does not match config");

  SolverResult result;
  MrfField field(rows, cols, E, opt.alpha, opt.beta);

  // Support prior seen by the BG denoiser before any MRF round: all
  // directional messages at 0.5.
  const std::array<double, 4> uniform{0.5, 0.5, 0.5, 0.5};
  const double base_prior = opt.fixed_support_prior.value_or(mrf_output_value(opt.alpha, uniform));
  std::vector<std::vector<double>> prior(bins, std::vector<double>(E, base_prior));

  std::vector<BinData> data;
  std::vector<BinState> state;
  data.reserve(bins);
  state.reserve(bins);
  result.hyper.reserve(bins);
  for (const auto& y : observations) {
    data.push_back(BinData::make(y, model));
    state.push_back(BinState::initial(E, opt.gamma1_init));
    result.hyper.push_back(initial_hyper(data.back(), model, base_prior));
  }
  std::vector<CVector> previous(bins, CVector::Zero(static_cast<Eigen::Index>(E)));

  if (diagnostics) *diagnostics << "iteration,bin_y,bin_z,gamma1,gamma2,eta1,eta2,residual\n";

  for (int k = 0; k < opt.max_iterations; ++k) {
    double change = 0.0, reference = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      BinState& s = state[b];
      const BinHyper& h = result.hyper[b];
      bg_denoise(s, h, prior[b], &result.flags);

      Extrinsic to_lmmse = extrinsic(s.g1, s.eta1, s.r1, s.gamma1, &result.flags);
      damp(s.r2, to_lmmse.r, opt.damping);
      s.gamma2 = damp(s.gamma2, to_lmmse.gamma, opt.damping);

      lmmse_denoise(s, h, data[b], model, opt.eta2_rule);

      Extrinsic to_bg = extrinsic(s.g2, s.eta2, s.r2, s.gamma2, &result.flags);
      damp(s.r1, to_bg.r, opt.damping);
      s.gamma1 = damp(s.gamma1, to_bg.gamma, opt.damping);

      check_finite(s, h, k, b / cols, b % cols);

      const double delta = (s.g1 - previous[b]).squaredNorm();
      change += delta;
      reference += previous[b].squaredNorm();
      previous[b] = s.g1;
      if (diagnostics)
        *diagnostics << k << ',' << b / cols << ',' << b % cols << ',' << s.gamma1 << ',' << s.gamma2
                     << ',' << s.eta1 << ',' << s.eta2 << ',' << delta << '\n';
    }

    if (opt.mrf_enabled && !opt.fixed_support_prior) {
      for (std::size_t b = 0; b < bins; ++b) {
        const BinState& s = state[b];
        const BinHyper& h = result.hyper[b];
        const bool from_bg = opt.mrf_input == MrfInputSource::kBgExtrinsic;
        const CVector& r = from_bg ? s.r2 : s.r1;
        const double gamma = from_bg ? s.gamma2 : s.gamma1;
        for (std::size_t e = 0; e < E; ++e)
          field.input(e, b / cols, b % cols) =
              support_likelihood(r(static_cast<Eigen::Index>(e)), gamma, h.mean, h.variance);
      }
      field.sweep(opt.mrf_iterations, &result.flags);
      for (std::size_t b = 0; b < bins; ++b)
        for (std::size_t e = 0; e < E; ++e) prior[b][e] = field.output(e, b / cols, b % cols, &result.flags);
    }

    if (opt.em_enabled) {
      for (std::size_t b = 0; b < bins; ++b) {
        result.hyper[b] = em_update(state[b], result.hyper[b], data[b], model, opt.noise_em_norm,
                                    &result.flags);
        check_finite(state[b], result.hyper[b], k, b / cols, b % cols);
      }
    }

    result.residual_trace.push_back(change);
    result.iterations = k + 1;
    // g1 of the first pass is fully determined by the initialization, so the
    // test starts one iteration later.
    if (k > 0 && change <= opt.stop_tolerance * reference) {
      result.converged = true;
      break;
    }
  }

  result.estimates.reserve(bins);
  for (auto& s : state) result.estimates.push_back(std::move(s.g1));
  return result;
}

}  // namespace gfra

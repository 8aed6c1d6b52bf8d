#include "gfra/experiment.hpp"

#include "gfra/channel_sim.hpp"
#include "gfra/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

namespace gfra {

int taps_for(double delay_spread, double sampling_interval) {
  const double ratio = delay_spread / sampling_interval;
  return static_cast<int>(std::ceil(ratio - 1e-12)) + 1;
}

SystemConfig preset(std::string_view name) {
  SystemConfig c;
  if (name == "fig2") {
    c.array_y = 1;
    c.array_z = 1;
    c.devices = 40;
    c.activity_prob = 0.2;
    c.symbols = 2;
    c.subcarriers = 64;
    c.max_doppler = 4e3;
    c.subcarrier_spacing = 15e3;
    c.threshold = 5.0;
  } else if (name == "fig3") {
    c.array_y = 4;
    c.array_z = 4;
    c.devices = 100;
    c.activity_prob = 0.1;
    c.symbols = 8;
    c.subcarriers = 32;
    c.max_doppler = 30e3;
    c.subcarrier_spacing = 240e3;
    c.threshold = 30.0;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "' (expected fig2 or fig3)");
  }
  c.delay_spread = 30e-9;
  c.paths_per_device = 4;
  c.basis_order = select_order(c.symbols, c.max_doppler, c.subcarrier_spacing);
  c.taps = taps_for(c.delay_spread, c.sampling_interval());
  return c;
}

TrialInputs prepare_trial(const SystemConfig& cfg_in, std::uint64_t seed) {
  TrialInputs in;
  std::vector<std::string> warnings;
  in.cfg = validate_config(cfg_in, &warnings);
  in.seed = seed;
  const SystemConfig& cfg = in.cfg;

  in.basis = &basis_for(cfg);
  in.scenario = sample_scenario(cfg, seed);
  if (cfg.channel_model == ChannelModel::kBemSubspace) project_scenario(in.scenario, *in.basis);

  Rng pilot_rng = make_rng(seed, Stream::kPilots);
  const PilotSet pilots = gen_pilots(cfg, pilot_rng);
  in.model = assemble_gamma(*in.basis, pilots, cfg);
  in.sparse = true_sparse_vectors(in.scenario, *in.basis, cfg);
  in.noise_var = calibrate_noise(cfg.snr_db, in.model.gamma, in.sparse, cfg);

  const std::size_t NY = cfg.array_y, NZ = cfg.array_z;
  Rng noise_rng = make_rng(seed, Stream::kNoise);
  Tensor<Complex, 4> noiseless;
  if (cfg.observation_path == ObservationPath::kPhysical) {
    noiseless = angular_transform(received_space(in.scenario, pilots, cfg, 0.0, noise_rng));
  }
  Tensor<Complex, 4> space_noise;
  if (cfg.noise_domain == NoiseDomain::kSpace) {
    Tensor<Complex, 4> w({NY, NZ, static_cast<std::size_t>(cfg.symbols),
                          static_cast<std::size_t>(cfg.subcarriers)});
    for (auto& v : w.data()) v = complex_normal(noise_rng, in.noise_var);
    space_noise = angular_transform(w);
  }

  in.observations.reserve(NY * NZ);
  for (std::size_t iy = 0; iy < NY; ++iy) {
    for (std::size_t iz = 0; iz < NZ; ++iz) {
      CVector y = cfg.observation_path == ObservationPath::kPhysical
                      ? bin_vector(noiseless, iy, iz)
                      : CVector(in.model.gamma * in.sparse[iy * NZ + iz]);
      if (cfg.noise_domain == NoiseDomain::kSpace) {
        y += bin_vector(space_noise, iy, iz);
      } else {
        for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += complex_normal(noise_rng, in.noise_var);
      }
      in.observations.push_back(std::move(y));
    }
  }
  return in;
}

TrialResult solve_trial(const TrialInputs& in, bool mrf_enabled) {
  const auto start = std::chrono::steady_clock::now();
  SystemConfig cfg = in.cfg;
  cfg.solver.mrf_enabled = mrf_enabled;

  const SolverResult sol = run_solver(in.observations, in.model, cfg);
  const ChannelEstimate estimate = reconstruct(sol.estimates, *in.basis, cfg);
  const ChannelEstimate truth = true_angular_channel(in.scenario, cfg);
  const Detection det = detect(estimate, cfg.threshold);

  TrialResult r;
  r.nmse_linear = nmse_linear(truth, estimate);
  r.nmse_db = to_db(r.nmse_linear);
  r.truth.reserve(in.scenario.devices.size());
  for (const auto& d : in.scenario.devices) r.truth.push_back(d.active ? 1 : 0);
  r.detected = det.active;
  r.energies = det.energies;
  r.aer = aer(r.truth, r.detected);
  r.iterations_used = sol.iterations;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

TrialResult run_trial(const SystemConfig& cfg, std::uint64_t seed, bool mrf_enabled) {
  const auto start = std::chrono::steady_clock::now();
  try {
    const TrialInputs in = prepare_trial(cfg, seed);
    TrialResult r = solve_trial(in, mrf_enabled);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  } catch (const std::exception& e) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "trial seed %llu, snr %g dB: ", static_cast<unsigned long long>(seed),
                  cfg.snr_db);
    throw std::runtime_error(buf + std::string(e.what()));
  }
}

std::string variant_name(bool mrf_enabled) { return mrf_enabled ? "em-mrf-vamp" : "em-vamp"; }

SweepOutcome run_sweep_trials(const SweepSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (spec.snr_points.empty()) throw std::invalid_argument("sweep: no SNR points");
  validate_config(spec.base);

  const std::string variant = variant_name(spec.mrf_enabled);
  const std::size_t per_point = static_cast<std::size_t>(spec.trials);
  const std::size_t jobs = spec.snr_points.size() * per_point;

  SweepOutcome out;
  out.records.resize(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      TrialRecord& rec = out.records[job];
      rec.variant = variant;
      rec.snr_db = spec.snr_points[job / per_point];
      rec.trial = static_cast<int>(job % per_point);
      rec.seed = spec.base.seed + static_cast<std::uint64_t>(rec.trial);
      SystemConfig cfg = spec.base;
      cfg.snr_db = rec.snr_db;
      try {
        rec.result = run_trial(cfg, rec.seed, spec.mrf_enabled);
        rec.status = "ok";
      } catch (const std::exception& e) {
        rec.status = std::string("error: ") + e.what();
      }
    }
  };

  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const double snr : spec.snr_points)
    out.rows.push_back(summarize(out.records, variant, snr, spec.base.seed));
  return out;
}

SweepRow summarize(const std::vector<TrialRecord>& records, const std::string& variant, double snr_db,
                   std::uint64_t seed_base) {
  SweepRow row;
  row.variant = variant;
  row.snr_db = snr_db;
  row.seed_base = seed_base;

  double nmse_sum = 0.0, aer_sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (r.variant != variant || r.snr_db != snr_db || r.status != "ok") continue;
    nmse_sum += r.result.nmse_linear;
    aer_sum += r.result.aer;
    ++n;
  }
  row.trials = n;
  if (n == 0) {
    row.nmse_db_mean = std::nan("");
    row.nmse_db_stderr = std::nan("");
    row.aer_mean = std::nan("");
    row.aer_stderr = std::nan("");
    return row;
  }
  const double nmse_mean = nmse_sum / n;
  const double aer_mean = aer_sum / n;
  double nmse_ss = 0.0, aer_ss = 0.0;
  for (const auto& r : records) {
    if (r.variant != variant || r.snr_db != snr_db || r.status != "ok") continue;
    nmse_ss += (r.result.nmse_linear - nmse_mean) * (r.result.nmse_linear - nmse_mean);
    aer_ss += (r.result.aer - aer_mean) * (r.result.aer - aer_mean);
  }
  const double nmse_se = n > 1 ? std::sqrt(nmse_ss / (n - 1) / n) : 0.0;
  const double aer_se = n > 1 ? std::sqrt(aer_ss / (n - 1) / n) : 0.0;
  row.nmse_db_mean = to_db(nmse_mean);
  // delta method: d(10 log10 x) = 10 / ln(10) dx / x
  row.nmse_db_stderr = nmse_mean > 0.0 ? 10.0 / std::log(10.0) * nmse_se / nmse_mean : 0.0;
  row.aer_mean = aer_mean;
  row.aer_stderr = aer_se;
  return row;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "variant,snr_db,trials,nmse_db_mean,nmse_db_stderr,aer_mean,aer_stderr,seed_base\n";
  for (const auto& r : rows)
    out << r.variant << ',' << num(r.snr_db) << ',' << r.trials << ',' << num(r.nmse_db_mean) << ','
        << num(r.nmse_db_stderr) << ',' << num(r.aer_mean) << ',' << num(r.aer_stderr) << ','
        << r.seed_base << '\n';
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "variant,snr_db,trial,seed,status,nmse_linear,nmse_db,aer,iterations\n";
  for (const auto& r : records) {
    const bool ok = r.status == "ok";
    out << r.variant << ',' << num(r.snr_db) << ',' << r.trial << ',' << r.seed << ','
        << sanitize(r.status) << ',' << (ok ? num(r.result.nmse_linear) : "") << ','
        << (ok ? num(r.result.nmse_db) : "") << ',' << (ok ? num(r.result.aer) : "") << ','
        << (ok ? std::to_string(r.result.iterations_used) : "") << '\n';
  }
}

std::filesystem::path trials_path_for(const std::filesystem::path& summary) {
  auto p = summary;
  p.replace_filename(summary.stem().string() + ".trials.csv");
  return p;
}

SweepOutcome run_sweep(const SweepSpec& spec) {
  SweepOutcome out = run_sweep_trials(spec);
  if (!spec.output.empty()) {
    std::ofstream summary(spec.output);
    if (!summary) throw std::runtime_error("cannot write " + spec.output.string());
    write_summary_csv(summary, out.rows);
    const auto raw_path = trials_path_for(spec.output);
    std::ofstream raw(raw_path);
    if (!raw) throw std::runtime_error("cannot write " + raw_path.string());
    write_trials_csv(raw, out.records);
  }
  return out;
}

}  // namespace gfra

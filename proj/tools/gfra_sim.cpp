#include "gfra/config_io.hpp"
#include "gfra/experiment.hpp"
#include "gfra/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

struct ConfigArgs {
  std::string preset;
  std::string config;
  std::vector<double> snr;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  bool no_mrf = false;
};

void add_config_options(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("--preset", a.preset, "fig2 or fig3")->check(CLI::IsMember({"fig2", "fig3"}));
  cmd->add_option("--config", a.config, "JSON config file, applied on top of the preset")
      ->check(CLI::ExistingFile);
  cmd->add_option("--snr", a.snr, "SNR points in dB")->delimiter(',');
  cmd->add_option("--seed", a.seed, "seed (sweep: seed of trial 0)");
  cmd->add_option("--threshold", a.threshold, "detection energy threshold");
  cmd->add_flag("--no-mrf", a.no_mrf, "disable the MRF (EM-VAMP)");
}

gfra::SystemConfig resolve(const ConfigArgs& a) {
  gfra::SystemConfig cfg = a.preset.empty() ? gfra::preset("fig3") : gfra::preset(a.preset);
  if (!a.config.empty()) cfg = gfra::load_config(a.config, cfg);
  if (a.seed) cfg.seed = *a.seed;
  if (a.threshold) cfg.threshold = *a.threshold;
  if (!a.snr.empty()) cfg.snr_db = a.snr.front();
  cfg.solver.mrf_enabled = !a.no_mrf;
  std::vector<std::string> warnings;
  cfg = gfra::validate_config(cfg, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

void print_result(const gfra::TrialResult& r, std::uint64_t seed, double snr) {
  std::printf("seed        %llu\n", static_cast<unsigned long long>(seed));
  std::printf("snr_db      %g\n", snr);
  std::printf("nmse_db     %.6f\n", r.nmse_db);
  std::printf("aer         %.6f\n", r.aer);
  std::printf("iterations  %d\n", r.iterations_used);
  std::printf("wall_time_s %.3f\n", r.wall_time);
  std::printf("u,active,detected,energy\n");
  for (std::size_t u = 0; u < r.truth.size(); ++u)
    std::printf("%zu,%d,%d,%.9g\n", u, r.truth[u], r.detected[u], r.energies[u]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grant-free random access channel estimation simulator (EM-MRF-VAMP)"};
  app.require_subcommand(1);

  ConfigArgs run_args;
  std::string diagnostics;
  auto* run = app.add_subcommand("run", "run a single trial and print its result");
  add_config_options(run, run_args);
  run->add_option("--diagnostics", diagnostics, "write per-iteration solver CSV to this file");

  ConfigArgs sweep_args;
  int trials = 200;
  std::string out = "sweep.csv";
  unsigned threads = 0;
  bool compare = false;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo SNR sweep to CSV");
  add_config_options(sweep, sweep_args);
  sweep->add_option("--trials", trials, "trials per SNR point")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "summary CSV path (raw rows go to <stem>.trials.csv)");
  sweep->add_option("--threads", threads, "worker threads (0: all cores)");
  sweep->add_flag("--compare", compare, "run both variants (with and without MRF) into one CSV");

  ConfigArgs cal_args;
  int cal_trials = 50;
  auto* cal = app.add_subcommand("calibrate-threshold",
                                 "choose the detection threshold minimizing the pooled activity error");
  add_config_options(cal, cal_args);
  cal->add_option("--trials", cal_trials, "calibration trials")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = resolve(run_args);
      if (!diagnostics.empty()) {
        std::ofstream diag(diagnostics);
        if (!diag) throw std::runtime_error("cannot write " + diagnostics);
        const auto in = gfra::prepare_trial(cfg, cfg.seed);
        gfra::run_solver(in.observations, in.model, in.cfg, &diag);
      }
      print_result(gfra::run_trial(cfg, cfg.seed, cfg.solver.mrf_enabled), cfg.seed, cfg.snr_db);
    } else if (*sweep) {
      gfra::SweepSpec spec;
      spec.base = resolve(sweep_args);
      spec.snr_points = sweep_args.snr.empty() ? std::vector<double>{0, 5, 10, 15, 20} : sweep_args.snr;
      spec.trials = trials;
      spec.threads = threads;
      std::vector<bool> variants{!sweep_args.no_mrf};
      if (compare) variants = {true, false};
      std::vector<gfra::SweepRow> rows;
      std::vector<gfra::TrialRecord> records;
      for (const bool mrf : variants) {
        spec.mrf_enabled = mrf;
        auto outcome = gfra::run_sweep_trials(spec);
        rows.insert(rows.end(), outcome.rows.begin(), outcome.rows.end());
        records.insert(records.end(), outcome.records.begin(), outcome.records.end());
      }
      std::size_t failed = 0;
      for (const auto& r : records)
        if (r.status != "ok") {
          ++failed;
          std::cerr << r.variant << " snr=" << r.snr_db << " trial=" << r.trial << ": " << r.status << '\n';
        }
      std::ofstream summary(out);
      if (!summary) throw std::runtime_error("cannot write " + out);
      gfra::write_summary_csv(summary, rows);
      const auto raw_path = gfra::trials_path_for(out);
      std::ofstream raw(raw_path);
      if (!raw) throw std::runtime_error("cannot write " + raw_path.string());
      gfra::write_trials_csv(raw, records);
      gfra::write_summary_csv(std::cout, rows);
      if (failed) std::cerr << failed << " of " << records.size() << " trials failed\n";
    } else if (*cal) {
      const auto cfg = resolve(cal_args);
      std::vector<gfra::TrialResult> results;
      for (int t = 0; t < cal_trials; ++t) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
        try {
          results.push_back(gfra::run_trial(cfg, seed, cfg.solver.mrf_enabled));
        } catch (const std::exception& e) {
          std::cerr << "trial " << t << " skipped: " << e.what() << '\n';
        }
      }
      const double xi = gfra::calibrate_threshold(results);
      double err = 0.0;
      for (const auto& r : results)
        err += gfra::aer(r.truth, gfra::detect_from_energies(r.energies, xi));
      std::printf("threshold %.9g\n", xi);
      std::printf("aer       %.6f\n", results.empty() ? 0.0 : err / static_cast<double>(results.size()));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

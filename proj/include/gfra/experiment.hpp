#pragma once

#include "gfra/detection.hpp"
#include "gfra/dps_bem.hpp"
#include "gfra/measurement.hpp"
#include "gfra/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace gfra {

/// Named configurations: "fig2" (single antenna, U=40, low Doppler) and
/// "fig3" (4x4 array, U=100, 30 kHz Doppler).
SystemConfig preset(std::string_view name);

/// Number of taps covering the delay spread: ceil(delay_spread / Ts) + 1.
int taps_for(double delay_spread, double sampling_interval);

/// Everything a solver run needs for one seeded trial.
struct TrialInputs {
  SystemConfig cfg;
  std::uint64_t seed = 0;
  ScenarioInstance scenario;
  const DpsBasis* basis = nullptr;
  MeasurementModel model;
  std::vector<CVector> sparse;        // ground-truth g per bin
  std::vector<CVector> observations;  // y per bin
  double noise_var = 0.0;
};

TrialInputs prepare_trial(const SystemConfig& cfg, std::uint64_t seed);

/// Runs the estimator on prepared inputs and scores it against the angular
/// channel of the scenario.
TrialResult solve_trial(const TrialInputs& inputs, bool mrf_enabled);

TrialResult run_trial(const SystemConfig& cfg, std::uint64_t seed, bool mrf_enabled);

struct SweepSpec {
  SystemConfig base;
  std::vector<double> snr_points;
  int trials = 200;
  bool mrf_enabled = true;
  std::filesystem::path output;  // summary CSV; raw rows go to <stem>.trials.csv
  unsigned threads = 0;          // 0: hardware concurrency
};

struct SweepRow {
  std::string variant;
  double snr_db = 0.0;
  int trials = 0;  // successful trials
  double nmse_db_mean = 0.0;
  double nmse_db_stderr = 0.0;
  double aer_mean = 0.0;
  double aer_stderr = 0.0;
  std::uint64_t seed_base = 0;
};

struct TrialRecord {
  std::string variant;
  double snr_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status;  // "ok" or the error message
  TrialResult result;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  std::vector<TrialRecord> records;
};

std::string variant_name(bool mrf_enabled);

/// Trial t uses seed base.seed + t at every SNR point. Trials run on a
/// worker pool; records are collected in (snr, trial) order so the output does
/// not depend on the thread count.
SweepOutcome run_sweep_trials(const SweepSpec& spec);

/// Aggregates successful records of one (variant, snr) group. NMSE is averaged
/// as a linear ratio and converted to dB afterwards.
SweepRow summarize(const std::vector<TrialRecord>& records, const std::string& variant, double snr_db,
                   std::uint64_t seed_base);

void write_summary_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);

std::filesystem::path trials_path_for(const std::filesystem::path& summary);

/// Runs the sweep and writes both CSV files.
SweepOutcome run_sweep(const SweepSpec& spec);

}  // namespace gfra

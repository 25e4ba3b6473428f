#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/config.hpp"
#include "risbeam/linalg.hpp"

namespace risbeam {

enum class SweepVariable { snr_db, iterations, n_elements, users };

std::string_view to_string(SweepVariable variable);
SweepVariable parse_sweep_variable(std::string_view name);

// Default axis values for each sweep.
std::vector<double> default_sweep_values(SweepVariable variable);

// Seeds assigned to trials 0 .. trials-1.
std::vector<std::uint64_t> trial_seeds(std::uint64_t seed_base, int trials);

// Per-user weights for one channel draw; strictly positive, summing to J.
RVector user_weights(WeightsRule rule, const ChannelSet& channels);

// Order-sensitive FNV-1a fingerprint of every matrix entry in the set.
std::uint64_t channel_fingerprint(const ChannelSet& channels);

struct TrialRecord {
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double wsr = 0.0;
  double initial_wsr = 0.0;
  std::vector<double> rates;
  int iterations_used = 0;
  double wall_ms = 0.0;
  std::uint64_t channel_hash = 0;
};

struct SweepPoint {
  double value = 0.0;
  double mean_wsr = 0.0;
  double std_wsr = 0.0;
  std::vector<double> mean_rates;
  int trials = 0;
};

struct ExperimentResult {
  SweepVariable variable = SweepVariable::snr_db;
  Algorithm algorithm = Algorithm::bcd;
  PartitionMode mode = PartitionMode::subarray;
  std::vector<std::uint64_t> seeds;
  std::vector<SweepPoint> points;
  // Ordered by (sweep value, trial).
  std::vector<TrialRecord> records;
};

struct RunOptions {
  int threads = 1;
  // Off by default so repeated runs write identical bytes.
  bool record_wall_time = false;
};

// Applies one sweep value to a copy of the config (snr_db, ris_side from
// N^2, users). Iteration values leave the config unchanged.
SystemConfig apply_sweep_value(const SystemConfig& config,
                               SweepVariable variable, double value);

// Runs the configured algorithm and mode over every (value, trial).
// Validates every swept config before running any trial.
ExperimentResult run_sweep(const SystemConfig& config, SweepVariable variable,
                           const std::vector<double>& values,
                           const RunOptions& options = {});

struct PairedDifference {
  std::string label;  // e.g. "bcd-wmmse_ls@subarray"
  double sweep_value = 0.0;
  double mean_difference = 0.0;
  // Fraction of trials whose difference has the sign of the mean.
  double sign_agreement = 0.0;
  int trials = 0;
};

struct ComparisonResult {
  // wmmse_ls/whole, wmmse_ls/subarray, bcd/whole, bcd/subarray.
  std::array<ExperimentResult, 4> arms;
  std::vector<PairedDifference> differences;

  const ExperimentResult& arm(Algorithm algorithm, PartitionMode mode) const;
};

// Every arm sees the same channel draw and receive-search inputs per trial.
ComparisonResult paired_comparison(const SystemConfig& config,
                                   SweepVariable variable,
                                   const std::vector<double>& values,
                                   const RunOptions& options = {});

// CSV columns: sweep_value, trial, seed, wsr, rate_user_1..J,
// iterations_used, wall_ms.
std::string results_csv(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);
std::string differences_csv(const ComparisonResult& result);
std::string manifest_text(const SystemConfig& config,
                          const ExperimentResult& result);

// Writes <prefix>results.csv, <prefix>summary.csv and <prefix>manifest.txt
// into `dir`, creating it if needed.
void write_results(const ExperimentResult& result, const SystemConfig& config,
                   const std::string& dir, const std::string& prefix = "");

void write_comparison(const ComparisonResult& result,
                      const SystemConfig& config, const std::string& dir);

}  // namespace risbeam

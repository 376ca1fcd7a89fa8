#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/baselines.hpp"
#include "dfrc/beampattern.hpp"
#include "dfrc/manifold_baseline.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/solution.hpp"
#include "dfrc/wmmse_bcd.hpp"

namespace dfrc {

// Monte-Carlo harness: one config file drives covariance design, SNR sweeps
// over the registered schemes, convergence traces and beampattern reports.
// All outputs are deterministic functions of the config (wall-clock timings
// live in a separate file outside that contract).

inline constexpr const char* kCsvSchema = "dfrc-csv-v1";

struct SweepConfig {
  explicit SweepConfig(SystemConfig sys) : system(std::move(sys)) {}

  SystemConfig system;  // noise_var here is a placeholder; each SNR point overrides it
  std::optional<BeampatternSpec> beampattern;
  std::optional<std::string> covariance_file;
  std::vector<double> snr_grid_db;  // transmit SNR P / sigma^2
  std::vector<std::string> schemes;
  int trials = 1;
  std::uint64_t seed_base = 0;
  std::string output_dir = ".";
  SolverOptions solver;
  ManifoldOptions manifold;
};

// Strict parse: unknown keys anywhere are a ConfigError.
SweepConfig load_sweep_config(const std::string& path);
void validate_sweep_config(const SweepConfig& cfg);

// R_des from the configured source (beampattern design or matrix file).
CovarianceSpec resolve_covariance(const SweepConfig& cfg);

struct SweepRow {
  std::string scheme;
  double snr_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double weighted_sum_rate = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ok = true;  // false: scheme threw or violated the covariance constraint
  std::string error;
  double wall_time_ms = 0.0;
};

struct SweepAggregate {
  std::string scheme;
  double snr_db = 0.0;
  double mean_rate = 0.0;
  double std_rate = 0.0;
  int trial_count = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;           // ordered by (scheme, snr, trial) as configured
  std::vector<SweepAggregate> aggregates;
  int flagged = 0;
};

BeamformerSolution run_scheme(const std::string& name, const ChannelSet& channels,
                              const CovarianceSpec& spec, const SystemConfig& cfg,
                              const SolverOptions& solver_opts, const ManifoldOptions& manifold_opts);

SweepResult run_sweep(const SweepConfig& cfg, int threads = 1);

// results.csv + aggregates.csv (deterministic) and timings.csv (not).
void write_sweep_csv(const SweepResult& result, const std::string& out_dir);

struct ConvergenceTraceRow {
  std::string scheme;
  int iteration = 0;
  double wsr = 0.0;
  double objective = 0.0;
  double constraint_residual = 0.0;
};

// Per-iteration traces for one (snr, trial); schemes must be iterative.
std::vector<ConvergenceTraceRow> convergence_trace(const SweepConfig& cfg);
void write_trace_csv(const std::vector<ConvergenceTraceRow>& rows, const std::string& path);

// (theta, ideal, achieved) over the grid, plus a generic plot script.
void emit_beampattern_report(const BeampatternSpec& spec, const CMat& r_des,
                             const std::string& csv_path);

void write_sweep_plot_script(const std::string& out_dir);

}  // namespace dfrc

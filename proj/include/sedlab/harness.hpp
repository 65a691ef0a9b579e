#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sedlab/diagnostics.hpp"
#include "sedlab/dynamics.hpp"
#include "sedlab/nearfield.hpp"
#include "sedlab/zeropoint.hpp"

namespace sedlab {

// Observation geometry for the nearfield experiment.
struct NearfieldCase {
  std::string particle = "electron";  // preset name, or "custom"
  ParticleEM custom;                  // used when particle == "custom"
  Vec3 rhat{1.0, 0.0, 0.0};
  double r = 1.0;
  Vec3 v{0.0, 0.0, 0.0};
  Vec3 a{0.0, 0.0, 0.0};
};

// Flat, fully-materialized run configuration. parse_config fills defaults per
// experiment, applies a key=value file and then override strings, resolves
// dt, and validates; every error names the offending key.
struct RunConfig {
  std::string experiment;  // hydrogen | oscillator | field-check | nearfield | inspiral

  FieldSpec field;          // energy_scale is driven by coupling_scale below
  bool field_on = true;
  double omega = 1.0;       // harmonic frequency (oscillator)
  int n_traj = 1;
  double t_end = 0.0;       // atomic time units
  double dt = 0.0;          // 0 = automatic policy
  double stride = 1.0;      // sample spacing, atomic time units
  double burn_in = 0.0;
  double r_ionize = 25.0;
  // Scales the bath energy density and the damping time together, preserving
  // the stationary statistics while shortening relaxation; 1 = physical.
  double coupling_scale = 1.0;
  std::string init = "circular";  // circular | gaussian
  double init_radius = 1.0;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";
  int workers = 1;
  bool allow_recurrence = false;

  NearfieldCase nearfield;
};

// Defaults for one experiment name. Throws std::invalid_argument for an
// unknown experiment.
RunConfig default_config(const std::string& experiment);

// Apply one "key=value" assignment. Unknown key or unparseable value throws
// std::invalid_argument naming the key.
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// Defaults, then the optional config file (key = value lines, '#' comments),
// then the override strings, then dt resolution and validation.
RunConfig parse_config(const std::string& experiment, const std::string& config_path,
                       const std::vector<std::string>& overrides);

// Step-size policy: min(field period at omega_max, orbital period) / 200.
double resolve_dt(const RunConfig& cfg);

// Full validation; throws std::invalid_argument naming keys. Includes the
// recurrence guard t_end < 2 pi n_freq / (omega_max - omega_min) unless
// allow_recurrence is set.
void validate_config(const RunConfig& cfg);

// Materialize the per-trajectory integration plan from a validated config.
IntegrationPlan make_plan(const RunConfig& cfg);

// Convenience overload: one trajectory under this config.
Trajectory simulate_trajectory(const RunConfig& cfg, Rng& rng);

struct StatusCounts {
  int completed = 0;
  int ionized = 0;
  int diverged = 0;
};

struct RunRecord {
  RunConfig config;
  std::string code_version;
  std::vector<std::uint64_t> traj_seeds;
  StatusCounts counts;
  std::vector<std::string> csv_paths;  // relative to out_dir
  double wall_clock_seconds = 0.0;     // kept out of the run-record file
};

// Run the configured experiment: dispatch trajectories across workers,
// merge diagnostics in trajectory-index order, write CSVs plus config echo
// and run record into out_dir. Deterministic for fixed (config, seed)
// independent of worker count; timing.txt is the one nondeterministic file.
// Throws std::runtime_error on runtime failure (worker error, I/O).
RunRecord run_experiment(const RunConfig& cfg);

// CSV emission, 17 significant digits so parsing returns the exact doubles.
void write_ledger_csv(const std::string& path, const EnergyLedger& ledger);
void write_histogram_csv(const std::string& path, const Histogram1D& hist,
                         const std::vector<double>& reference_masses);
void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, double>>& rows);

// Minimal CSV reader for round-trip checks: returns header + rows of cells.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace sedlab

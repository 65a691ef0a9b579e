#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sedlab/units.hpp"
#include "sedlab/vec3.hpp"

namespace sedlab {

struct Trajectory;

// Cumulative energy bookkeeping along one trajectory, sampled on the same
// grid as the trajectory itself. work_rr is the signed work done by the
// radiation-reaction force; it closes the balance exactly:
//   mech(t) - mech(0) = work_in(t) + work_rr(t)      (up to integrator error)
// radiated is the nonnegative Larmor integral, the physically emitted energy;
// pathwise it need not equal -work_rr, only on stationary averages.
struct EnergyLedger {
  std::vector<double> t;
  std::vector<double> work_in;
  std::vector<double> radiated;
  std::vector<double> mech;
  std::vector<double> work_rr;

  std::size_t size() const { return t.size(); }
  void push(double time, double win, double rad, double energy, double wrr) {
    t.push_back(time);
    work_in.push_back(win);
    radiated.push_back(rad);
    mech.push_back(energy);
    work_rr.push_back(wrr);
  }
};

// Windowed power balance. residual = |mean_p_in - mean_p_rad - mech_drift|
// over mean_p_rad; on a stationary run it measures how cleanly energy flows
// through the particle rather than accumulating.
struct ThroughputReport {
  double mean_p_in = 0.0;
  double mean_p_rad = 0.0;
  double mech_drift = 0.0;
  double residual = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
};

// Instantaneous radiated power, tau * |a|^2 (tau defaults to the electron
// radiation-reaction time).
double larmor_power(const Vec3& a, double tau = units::tau_e);

// Rate of work done by the transverse field on the simulated charge. Sign
// convention throughout: the field force on the charge is +E, so this is
// +dot(e, v); e = x_hat with v = x_hat gives +1.
double input_power(const Vec3& e_field, const Vec3& v);

// Mean powers over [t_start, t_end] from ledger increments, mechanical drift
// as the least-squares slope of mech samples in the window. Throws
// std::invalid_argument when fewer than two ledger rows fall inside.
ThroughputReport throughput_report(const EnergyLedger& ledger, double t_start,
                                   double t_end);

// Weighted 1-d histogram over fixed edges. Out-of-range values are ignored
// entirely (they contribute to neither counts nor normalization), so merged
// histograms stay consistent and sum(counts) == normalization.
struct Histogram1D {
  std::vector<double> edges;   // n_bins + 1, strictly increasing
  std::vector<double> counts;  // weighted occupation per bin
  double normalization = 0.0;  // total in-range weight

  explicit Histogram1D(std::vector<double> bin_edges);
  Histogram1D() = default;

  std::size_t n_bins() const { return counts.size(); }
  void add(double x, double weight);
  void merge(const Histogram1D& other);  // same edges required
  double density(std::size_t bin) const;
};

// Time-weighted occupancy of |r| across all post-burn-in samples of the
// given trajectories. Throws std::runtime_error when no trajectory
// contributes any sample past burn_in.
Histogram1D radial_histogram(const std::vector<Trajectory>& trajectories,
                             std::vector<double> edges, double burn_in);

// Same, for one Cartesian component (axis 0, 1, 2).
Histogram1D position_histogram_1d(const std::vector<Trajectory>& trajectories,
                                  int axis, std::vector<double> edges,
                                  double burn_in);

// Hydrogen ground-state radial density 4 r^2 exp(-2r), normalized on [0, inf).
double qm_ground_state_radial(double r);

// Stationary harmonic position density per component: mean 0, variance
// 1/(2 omega). Evaluated at x.
double gaussian_reference(double x, double omega);

// Per-bin masses of a reference density over the given edges (composite
// Simpson within each bin). Shared by the comparison metrics and the
// histogram CSV reference column.
std::vector<double> bin_reference_masses(const std::vector<double>& edges,
                                         const std::function<double(double)>& reference);

// Distance measures between a normalized histogram and a reference density.
// The reference is integrated per bin; bins whose reference mass falls below
// 1e-15 are excluded from the divergence and their sample mass is reported in
// excluded_mass (a reference that is exactly zero under an occupied bin still
// yields kl = +infinity). Remaining masses are renormalized before comparing.
struct ComparisonMetrics {
  double l2 = 0.0;           // sqrt(integral of (density difference)^2)
  double kl = 0.0;           // KL(hist || reference) over included bins
  double peak_offset = 0.0;  // |argmax(hist) - argmax(reference)|
  double excluded_mass = 0.0;
};
ComparisonMetrics compare_distributions(const Histogram1D& hist,
                                        const std::function<double(double)>& reference);

// Streaming raw moments up to order four, with exact associative merge.
// Used for ensemble position statistics (variance, excess kurtosis).
struct MomentAccumulator {
  double n = 0.0;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;

  void add(double x, double weight = 1.0);
  void merge(const MomentAccumulator& other);
  double mean() const;
  double variance() const;         // population (biased) variance
  double excess_kurtosis() const;  // m4 / m2^2 - 3, central moments
};

}  // namespace sedlab

#pragma once

#include <vector>

#include "sedlab/diagnostics.hpp"
#include "sedlab/rng.hpp"
#include "sedlab/units.hpp"
#include "sedlab/vec3.hpp"
#include "sedlab/zeropoint.hpp"

namespace sedlab {

enum class PotentialKind { coulomb, harmonic, free_motion };

struct PotentialModel {
  PotentialKind kind = PotentialKind::coulomb;
  double omega = 1.0;  // harmonic only

  static PotentialModel coulomb() { return {PotentialKind::coulomb, 1.0}; }
  static PotentialModel harmonic(double omega) { return {PotentialKind::harmonic, omega}; }
  static PotentialModel free() { return {PotentialKind::free_motion, 1.0}; }
  void validate() const;  // harmonic requires omega > 0
};

struct ParticleState {
  Vec3 r{0.0, 0.0, 0.0};
  Vec3 v{0.0, 0.0, 0.0};
  double t = 0.0;
  bool finite() const { return sedlab::finite(r) && sedlab::finite(v) && std::isfinite(t); }
};

// Binding force at unit mass and unit charge numbers: coulomb -> -r/|r|^3,
// harmonic -> -omega^2 r, free -> 0. Coulomb throws std::domain_error at r = 0.
Vec3 binding_force(const PotentialModel& model, const Vec3& r);

// d/dt of the binding force along a trajectory passing through (r, v).
Vec3 binding_force_rate(const PotentialModel& model, const Vec3& r, const Vec3& v);

// Order-reduced radiation reaction: the third-derivative damping term is
// replaced by tau * d/dt(F_external)/m, with the field's time derivative
// supplied directly (e_field_dot, the analytic dE/dt of the mode sum).
Vec3 radiation_reaction(const PotentialModel& model, const ParticleState& state,
                        const Vec3& e_field_dot, double tau = units::tau_e);

// Kinetic plus potential energy of the bound charge.
double mechanical_energy(const PotentialModel& model, const Vec3& r, const Vec3& v);

// One classical RK4 step of
//   r'' = binding_force + radiation_reaction + E(t)
// with the field evaluated at the stage times. The smooth mode sum makes this
// an ODE with quasi-periodic forcing, not a white-noise SDE. Preconditions:
// dt > 0 and, for a nonempty ensemble, dt <= 0.05 * (2 pi / omega_max).
ParticleState step(const ParticleState& state, double dt, const PotentialModel& model,
                   const ModeEnsemble& ensemble, double tau = units::tau_e);

enum class TrajStatus { completed, ionized, diverged };

struct TrajectorySample {
  ParticleState state;
  double p_in = 0.0;   // instantaneous field input power at the sample
  double p_rad = 0.0;  // instantaneous Larmor power at the sample
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // strictly increasing in t
  TrajStatus status = TrajStatus::completed;
  EnergyLedger ledger;  // rows on the same time grid as samples
};

// Everything one trajectory integration needs, fully resolved (the harness
// materializes this from a run configuration).
struct IntegrationPlan {
  PotentialModel model = PotentialModel::coulomb();
  FieldSpec field;
  bool field_on = true;
  double t_end = 0.0;
  double dt = 0.01;
  int stride_steps = 1;     // record every this many steps
  double r_ionize = 25.0;   // |r| beyond this -> status ionized
  double tau = units::tau_e;
  enum class Init { circular_orbit, stationary_gaussian, fixed } init = Init::circular_orbit;
  double init_radius = 1.0;    // circular_orbit
  ParticleState init_state;    // fixed

  void validate() const;
};

// Integrate one trajectory. Draw order from rng is fixed: first the mode
// ensemble (when field_on), then the initial conditions. Termination:
// t_end reached (completed), |r| > r_ionize (ionized), non-finite state or
// coulomb |r| < 1e-3 (diverged). The initial state is always recorded;
// t_end = 0 yields exactly one sample.
Trajectory simulate_trajectory(const IntegrationPlan& plan, Rng& rng);

}  // namespace sedlab

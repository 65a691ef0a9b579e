#pragma once

#include <cstdint>
#include <vector>

#include "sedlab/rng.hpp"
#include "sedlab/units.hpp"
#include "sedlab/vec3.hpp"

namespace sedlab {

// Spectral energy density of the classical zero-point field,
//   rho(omega) = hbar omega^3 / (2 pi^2 c^3),
// energy per volume per unit angular frequency. Throws std::domain_error for
// omega < 0. Defaults are atomic units; pass hbar = c = 1 to read off the
// dimensionless shape.
double spectral_density(double omega, double hbar = units::hbar, double c = units::c);

// Finite-mode realisation of the field inside a frequency window.
// n_freq cells cover [omega_min, omega_max]; each cell gets n_dir random
// propagation directions with two polarisations each. jitter in [0,1) offsets
// every cell frequency by u*jitter*dw (u uniform per cell) so the comb is
// incommensurate and mode recurrences are suppressed.
struct FieldSpec {
  double omega_min = 0.3;
  double omega_max = 3.0;
  int n_freq = 600;
  int n_dir = 16;
  double jitter = 0.5;
  std::uint64_t seed = 1;

  // Multiplies the energy carried per mode. Anything but 1 is a fictitious
  // bath: statistically meaningful only when the radiation-reaction constant
  // is scaled by the same factor, which preserves the stationary state while
  // shortening relaxation times (see RunConfig.coupling_scale).
  double energy_scale = 1.0;

  void validate() const;  // throws std::invalid_argument naming the bad field
};

// One plane-wave mode. (eps1, eps2, khat) is orthonormal; a*, b* are the
// N(0,1) quadrature amplitudes per polarisation; amplitude_scale carries the
// continuum normalisation rho(omega) dw / (eps0 * n_dir * 2) per polarisation,
// so that summed over the ensemble eps0 <E^2> equals the window integral of
// spectral_density.
struct Mode {
  double omega = 0.0;
  Vec3 khat, eps1, eps2;
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  double amplitude_scale = 0.0;
};

struct ModeEnsemble {
  std::vector<Mode> modes;
  FieldSpec spec;

  static ModeEnsemble empty();  // zero modes: every field evaluation is 0
};

// Orthonormal polarisation pair transverse to khat. Gram-Schmidt against a
// fixed z reference, falling back to x when khat is within ~8 degrees of z.
void polarization_basis(const Vec3& khat, Vec3& eps1, Vec3& eps2);

// Draws the full ensemble. Deterministic: identical (spec, rng seed) give a
// bit-identical ensemble. The one-argument overload seeds from spec.seed.
ModeEnsemble sample_modes(const FieldSpec& spec, Rng& rng);
ModeEnsemble sample_modes(const FieldSpec& spec);

// Electric field at the origin in the dipole approximation (spatial phase
// dropped): sum of amplitude_scale * [a cos(wt) + b sin(wt)] per polarisation.
Vec3 efield_dipole(const ModeEnsemble& ens, double t);

// Analytic time derivative of efield_dipole; the order-reduced radiation
// reaction force needs dE/dt.
Vec3 efield_dipole_dot(const ModeEnsemble& ens, double t);

// Vector potential with full spatial phase k.r - w t, k = (omega/c) khat.
// Per mode: (amplitude_scale/omega) * [a sin(k.r - wt) + b cos(k.r - wt)].
Vec3 afield_full(const ModeEnsemble& ens, const Vec3& r, double t);

// E = -dA/dt with the same phases; reduces to efield_dipole exactly at r = 0.
Vec3 efield_full(const ModeEnsemble& ens, const Vec3& r, double t);

// Analytic window integral of the spectral density times energy_scale: the
// target value of eps0 <E^2> for ensembles drawn from this spec.
double window_energy_density(const FieldSpec& spec);

// The dipole-limit sum regrouped per frequency cell:
//   E(t) = sum_i [ C_i cos(w_i t) + S_i sin(w_i t) ],
// an exact reordering of efield_dipole that costs one sincos per cell instead
// of per mode. Feeds the integrator.
struct DipoleField {
  std::vector<double> omega;
  std::vector<Vec3> C, S;

  DipoleField() = default;
  explicit DipoleField(const ModeEnsemble& ens);

  bool empty() const { return omega.empty(); }
  double max_omega() const;
  void eval(double t, Vec3& e, Vec3& edot) const;
};

// Walks a DipoleField along a fixed time grid t0 + k*h, advancing each cell's
// (cos, sin) by one precomputed rotation per step and resyncing against libm
// every few thousand steps to kill roundoff drift. Bit-deterministic.
class DipoleFieldWalker {
 public:
  DipoleFieldWalker(const DipoleField& field, double t0, double h);

  double time() const { return t0_ + static_cast<double>(k_) * h_; }
  void advance();                            // one grid step
  void value(Vec3& e, Vec3& edot) const;     // field at the current grid time

 private:
  void resync();

  static constexpr std::uint64_t kResyncEvery = 4096;

  const DipoleField* field_;
  double t0_, h_;
  std::uint64_t k_ = 0;
  std::vector<double> c_, s_;    // cos/sin(w_i t_k)
  std::vector<double> ch_, sh_;  // cos/sin(w_i h)
};

}  // namespace sedlab

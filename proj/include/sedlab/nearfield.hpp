#pragma once

#include <optional>
#include <string>

#include "sedlab/vec3.hpp"

namespace sedlab {

// Point particle with enough electromagnetic structure for near-field work.
// Charge is z in units of e; spin is in units of hbar.
struct ParticleEM {
  int z = -1;
  double mass = 1.0;
  double g = 0.0;
  Vec3 spin{0.0, 0.0, 0.0};
  // Conventional moments (neutron: g_n against the nuclear magneton) bypass
  // the g(q/2m)S formula, which degenerates for q = 0.
  std::optional<Vec3> moment_override;

  void validate() const;  // mass > 0
};

// Per-term field decomposition at an observation point. total_* are the
// exact sums of their listed parts.
struct FieldAtPoint {
  Vec3 e_charge, e_rad;
  Vec3 b_dipole, b_lorentz, b_rad;
  Vec3 total_e, total_b;
};

// g (q / 2m) S, unless the particle carries an explicit override.
Vec3 magnetic_moment(const ParticleEM& particle);

// Static-plus-radiation near field of a slowly moving particle at distance r
// along unit vector rhat, given instantaneous velocity and acceleration.
// Warns on stderr above 0.1 c; throws std::domain_error for r <= 0.
FieldAtPoint near_field(const ParticleEM& particle, const Vec3& rhat, double r,
                        const Vec3& v, const Vec3& a);

// Bundled particles: "electron", "proton", "neutron" (spin hbar/2 along z).
// Unknown names throw std::invalid_argument listing the choices.
ParticleEM particle_preset(const std::string& name);

}  // namespace sedlab

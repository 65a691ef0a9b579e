#include "sedlab/nearfield.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>

#include "sedlab/units.hpp"

namespace sedlab {

void ParticleEM::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("ParticleEM: mass must be > 0");
}

Vec3 magnetic_moment(const ParticleEM& particle) {
  particle.validate();
  if (particle.moment_override) return *particle.moment_override;
  const double q = static_cast<double>(particle.z);
  return (particle.g * q / (2.0 * particle.mass)) * particle.spin;
}

FieldAtPoint near_field(const ParticleEM& particle, const Vec3& rhat, double r,
                        const Vec3& v, const Vec3& a) {
  particle.validate();
  if (!(r > 0.0)) throw std::domain_error("near_field: r must be > 0");
  if (norm(v) > 0.1 * units::c) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "near_field: |v| = %.3g exceeds 0.1 c; nonrelativistic "
                  "expressions degrade\n",
                  norm(v));
    std::cerr << buf;
  }

  const double q = static_cast<double>(particle.z);
  const Vec3 m = magnetic_moment(particle);
  const double a2 = units::alpha * units::alpha;  // mu0/4pi = 1/c^2
  const double r2 = r * r;
  const double r3 = r2 * r;

  FieldAtPoint f;
  f.e_charge = (q / r2) * rhat;
  f.e_rad = (q * a2 / r) * cross(rhat, cross(rhat, a));
  f.b_dipole = (a2 / r3) * (3.0 * dot(rhat, m) * rhat - m);
  f.b_lorentz = (q * a2 / r2) * cross(v, rhat);
  f.b_rad = (-q * a2 * units::alpha / r) * cross(rhat, a);
  f.total_e = f.e_charge + f.e_rad;
  f.total_b = f.b_dipole + f.b_lorentz + f.b_rad;
  return f;
}

ParticleEM particle_preset(const std::string& name) {
  const Vec3 spin_z{0.0, 0.0, 0.5};
  ParticleEM p;
  p.spin = spin_z;
  if (name == "electron") {
    p.z = -1;
    p.mass = units::m_e;
    p.g = -2.00231930436;  // external reference value (CODATA), sign for q = -e
    return p;
  }
  if (name == "proton") {
    p.z = 1;
    p.mass = units::m_p;
    p.g = 5.585694713;
    return p;
  }
  if (name == "neutron") {
    p.z = 0;
    p.mass = units::m_n;
    p.g = -3.82608545;
    // The magneton convention behind g_n uses the proton mass and charge +e.
    p.moment_override = (p.g / (2.0 * units::m_p)) * spin_z;
    return p;
  }
  throw std::invalid_argument("particle_preset: unknown name '" + name +
                              "' (choices: electron, proton, neutron)");
}

}  // namespace sedlab

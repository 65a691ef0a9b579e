#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "sedlab/nearfield.hpp"
#include "sedlab/rng.hpp"
#include "sedlab/units.hpp"

using namespace sedlab;

namespace {

// Redirect std::cerr for the duration of one call.
struct CerrCapture {
  std::ostringstream sink;
  std::streambuf* saved;
  CerrCapture() : saved(std::cerr.rdbuf(sink.rdbuf())) {}
  ~CerrCapture() { std::cerr.rdbuf(saved); }
  std::string text() const { return sink.str(); }
};

}  // namespace

TEST_CASE("magnetic moment: formula, overrides, degenerate cases") {
  ParticleEM p;
  p.z = 1;
  p.mass = units::m_p;
  p.g = 5.585694713;
  p.spin = {0.0, 0.0, 0.5};
  const Vec3 m = magnetic_moment(p);
  CHECK(m.x == 0.0);
  CHECK(m.y == 0.0);
  CHECK(m.z == doctest::Approx(5.585694713 * 0.5 / (2.0 * units::m_p)).epsilon(1e-15));

  // Zero spin kills the moment.
  ParticleEM s0 = p;
  s0.spin = {0.0, 0.0, 0.0};
  CHECK(norm(magnetic_moment(s0)) == 0.0);

  // Neutral particle with vanishing g: inert.
  ParticleEM nu;
  nu.z = 0;
  nu.mass = 1.0;
  nu.g = 1e-12;
  nu.spin = {0.0, 0.0, 0.5};
  CHECK(norm(magnetic_moment(nu)) == 0.0);  // q = 0 wins regardless of g

  // Override replaces the formula entirely.
  ParticleEM n = particle_preset("neutron");
  const Vec3 mn = magnetic_moment(n);
  CHECK(mn.z == doctest::Approx(-3.82608545 * 0.5 / (2.0 * units::m_p)).epsilon(1e-15));
  CHECK(mn.z < 0.0);

  ParticleEM bad;
  bad.mass = 0.0;
  CHECK_THROWS_AS(magnetic_moment(bad), std::invalid_argument);
}

TEST_CASE("presets") {
  const ParticleEM e = particle_preset("electron");
  CHECK(e.z == -1);
  CHECK(e.mass == 1.0);
  CHECK(e.g == doctest::Approx(-2.00231930436).epsilon(1e-15));
  CHECK(!e.moment_override.has_value());

  const ParticleEM pr = particle_preset("proton");
  CHECK(pr.z == 1);
  CHECK(pr.mass == doctest::Approx(1836.15267343).epsilon(1e-15));

  const ParticleEM n = particle_preset("neutron");
  CHECK(n.z == 0);
  CHECK(n.moment_override.has_value());

  CHECK_THROWS_AS(particle_preset("muon"), std::invalid_argument);
  try {
    particle_preset("muon");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("electron") != std::string::npos);
  }
}

TEST_CASE("static electron: pure Coulomb term") {
  ParticleEM e = particle_preset("electron");
  e.spin = {0.0, 0.0, 0.0};
  const FieldAtPoint f = near_field(e, {1.0, 0.0, 0.0}, 1.0, {0, 0, 0}, {0, 0, 0});
  CHECK(f.e_charge.x == -1.0);
  CHECK(f.e_charge.y == 0.0);
  CHECK(f.e_charge.z == 0.0);
  CHECK(norm(f.e_rad) == 0.0);
  CHECK(norm(f.b_dipole) == 0.0);
  CHECK(norm(f.b_lorentz) == 0.0);
  CHECK(norm(f.b_rad) == 0.0);
  CHECK(f.total_e.x == f.e_charge.x);
  CHECK(norm(f.total_b) == 0.0);
}

TEST_CASE("neutron: pure dipole structure with 1/r^3 falloff") {
  const ParticleEM n = particle_preset("neutron");
  const Vec3 rhat = normalized(Vec3{1.0, 2.0, -0.5});
  const Vec3 v{0.01, 0.02, 0.0};
  const Vec3 a{0.3, -0.1, 0.2};
  const FieldAtPoint f1 = near_field(n, rhat, 1.5, v, a);
  CHECK(norm(f1.e_charge) == 0.0);
  CHECK(norm(f1.e_rad) == 0.0);
  CHECK(norm(f1.b_lorentz) == 0.0);
  CHECK(norm(f1.b_rad) == 0.0);
  CHECK(norm(f1.b_dipole) > 0.0);

  const FieldAtPoint f2 = near_field(n, rhat, 3.0, v, a);
  // Power-of-two distance scaling is exact in floating point.
  CHECK(f2.b_dipole.x == f1.b_dipole.x / 8.0);
  CHECK(f2.b_dipole.y == f1.b_dipole.y / 8.0);
  CHECK(f2.b_dipole.z == f1.b_dipole.z / 8.0);
}

TEST_CASE("term-by-term distance scaling at r and 2r") {
  ParticleEM e = particle_preset("electron");
  const Vec3 rhat = normalized(Vec3{0.2, -1.0, 0.4});
  const Vec3 v{0.5, 0.1, -0.3};
  const Vec3 a{2.0, 1.0, -4.0};
  const FieldAtPoint f1 = near_field(e, rhat, 0.75, v, a);
  const FieldAtPoint f2 = near_field(e, rhat, 1.5, v, a);

  auto exact_ratio = [](const Vec3& big, const Vec3& small, double k) {
    CHECK(small.x == big.x / k);
    CHECK(small.y == big.y / k);
    CHECK(small.z == big.z / k);
  };
  exact_ratio(f1.e_charge, f2.e_charge, 4.0);
  exact_ratio(f1.b_dipole, f2.b_dipole, 8.0);
  exact_ratio(f1.b_lorentz, f2.b_lorentz, 4.0);
  exact_ratio(f1.e_rad, f2.e_rad, 2.0);
  exact_ratio(f1.b_rad, f2.b_rad, 2.0);
}

TEST_CASE("radiation terms: transversality and E-B relation") {
  Rng rng(5);
  const ParticleEM e = particle_preset("electron");
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 rhat = rng.unit_vector();
    const Vec3 a{4.0 * rng.normal(), 4.0 * rng.normal(), 4.0 * rng.normal()};
    const Vec3 v{0.1 * rng.normal(), 0.1 * rng.normal(), 0.1 * rng.normal()};
    const double r = 0.1 + 3.0 * rng.uniform01();
    const FieldAtPoint f = near_field(e, rhat, r, v, a);

    if (norm(f.e_rad) > 0.0) CHECK(std::fabs(dot(rhat, f.e_rad)) < 1e-12 * norm(f.e_rad));
    if (norm(f.b_rad) > 0.0) CHECK(std::fabs(dot(rhat, f.b_rad)) < 1e-12 * norm(f.b_rad));

    // b_rad = (rhat x e_rad) / c, an identity of the two radiation terms.
    const Vec3 predicted = cross(rhat, f.e_rad) / units::c;
    CHECK(norm(predicted - f.b_rad) <= 1e-12 * norm(f.b_rad));

    // total fields are the exact term sums
    const Vec3 de = f.total_e - (f.e_charge + f.e_rad);
    const Vec3 db = f.total_b - (f.b_dipole + f.b_lorentz + f.b_rad);
    CHECK(norm(de) == 0.0);
    CHECK(norm(db) == 0.0);
  }
}

TEST_CASE("linearity in acceleration and in moment") {
  const ParticleEM e = particle_preset("electron");
  const Vec3 rhat = normalized(Vec3{1.0, 1.0, 0.2});
  const Vec3 v{0.0, 0.0, 0.0};
  const Vec3 a1{1.0, 0.0, -2.0};
  const Vec3 a2{-0.5, 3.0, 1.0};
  const FieldAtPoint fa = near_field(e, rhat, 2.0, v, a1);
  const FieldAtPoint fb = near_field(e, rhat, 2.0, v, a2);
  const FieldAtPoint fab = near_field(e, rhat, 2.0, v, a1 + a2);
  CHECK(norm(fab.e_rad - (fa.e_rad + fb.e_rad)) <= 1e-12 * norm(fab.e_rad));
  CHECK(norm(fab.b_rad - (fa.b_rad + fb.b_rad)) <= 1e-12 * norm(fab.b_rad));

  ParticleEM half = e;
  half.spin = {0.0, 0.0, 0.25};
  const FieldAtPoint fh = near_field(half, rhat, 2.0, v, a1);
  CHECK(norm(fa.b_dipole - 2.0 * fh.b_dipole) <= 1e-12 * norm(fa.b_dipole));
}

TEST_CASE("domain errors and the fast-motion warning") {
  const ParticleEM e = particle_preset("electron");
  CHECK_THROWS_AS(near_field(e, {1, 0, 0}, 0.0, {0, 0, 0}, {0, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(near_field(e, {1, 0, 0}, -1.0, {0, 0, 0}, {0, 0, 0}), std::domain_error);

  {
    CerrCapture cap;
    near_field(e, {1, 0, 0}, 1.0, {20.0, 0.0, 0.0}, {0, 0, 0});  // 0.146 c
    CHECK(cap.text().find("0.1 c") != std::string::npos);
  }
  {
    CerrCapture cap;
    near_field(e, {1, 0, 0}, 1.0, {1.0, 0.0, 0.0}, {0, 0, 0});
    CHECK(cap.text().empty());
  }
}

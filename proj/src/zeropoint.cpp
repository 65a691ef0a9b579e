#include "sedlab/zeropoint.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sedlab {

double spectral_density(double omega, double hbar, double c) {
  if (omega < 0.0) throw std::domain_error("spectral_density: omega must be non-negative");
  return hbar * omega * omega * omega / (2.0 * units::pi * units::pi * c * c * c);
}

void FieldSpec::validate() const {
  if (!(omega_min > 0.0)) throw std::invalid_argument("FieldSpec: omega_min must be > 0");
  if (!(omega_max > omega_min))
    throw std::invalid_argument("FieldSpec: omega_max must exceed omega_min");
  if (n_freq < 1) throw std::invalid_argument("FieldSpec: n_freq must be >= 1");
  if (n_dir < 1) throw std::invalid_argument("FieldSpec: n_dir must be >= 1");
  if (!(jitter >= 0.0) || jitter >= 1.0)
    throw std::invalid_argument("FieldSpec: jitter must lie in [0, 1)");
  if (!(energy_scale > 0.0)) throw std::invalid_argument("FieldSpec: energy_scale must be > 0");
}

ModeEnsemble ModeEnsemble::empty() {
  ModeEnsemble ens;
  ens.spec.n_freq = 0;  // marks the spec as not drawn from sample_modes
  return ens;
}

void polarization_basis(const Vec3& khat, Vec3& eps1, Vec3& eps2) {
  // Reference axis z; swap to x when khat is nearly parallel to z.
  Vec3 ref{0.0, 0.0, 1.0};
  if (std::fabs(khat.z) > 0.99) ref = Vec3{1.0, 0.0, 0.0};
  eps1 = normalized(ref - dot(ref, khat) * khat);
  eps2 = cross(khat, eps1);
}

ModeEnsemble sample_modes(const FieldSpec& spec, Rng& rng) {
  spec.validate();
  const double dw = (spec.omega_max - spec.omega_min) / spec.n_freq;

  ModeEnsemble ens;
  ens.spec = spec;
  ens.modes.reserve(static_cast<std::size_t>(spec.n_freq) * spec.n_dir);

  for (int i = 0; i < spec.n_freq; ++i) {
    const double u = rng.uniform01();
    const double w = spec.omega_min + (static_cast<double>(i) + u * spec.jitter) * dw;
    // Per polarisation: scale^2 = energy_scale * rho(w) dw / (eps0 * n_dir * 2),
    // which makes eps0 <E^2> reproduce the continuum window integral.
    const double scale = std::sqrt(spec.energy_scale * spectral_density(w) * dw /
                                   (units::eps0 * spec.n_dir * 2.0));
    for (int d = 0; d < spec.n_dir; ++d) {
      Mode m;
      m.omega = w;
      m.khat = rng.unit_vector();
      polarization_basis(m.khat, m.eps1, m.eps2);
      m.a1 = rng.normal();
      m.b1 = rng.normal();
      m.a2 = rng.normal();
      m.b2 = rng.normal();
      m.amplitude_scale = scale;
      ens.modes.push_back(m);
    }
  }
  return ens;
}

ModeEnsemble sample_modes(const FieldSpec& spec) {
  Rng rng(spec.seed);
  return sample_modes(spec, rng);
}

Vec3 efield_dipole(const ModeEnsemble& ens, double t) {
  Vec3 e;
  for (const Mode& m : ens.modes) {
    const double cw = std::cos(m.omega * t);
    const double sw = std::sin(m.omega * t);
    e += m.amplitude_scale *
         ((m.a1 * cw + m.b1 * sw) * m.eps1 + (m.a2 * cw + m.b2 * sw) * m.eps2);
  }
  return e;
}

Vec3 efield_dipole_dot(const ModeEnsemble& ens, double t) {
  Vec3 edot;
  for (const Mode& m : ens.modes) {
    const double cw = std::cos(m.omega * t);
    const double sw = std::sin(m.omega * t);
    edot += m.amplitude_scale * m.omega *
            ((m.b1 * cw - m.a1 * sw) * m.eps1 + (m.b2 * cw - m.a2 * sw) * m.eps2);
  }
  return edot;
}

Vec3 afield_full(const ModeEnsemble& ens, const Vec3& r, double t) {
  Vec3 a;
  for (const Mode& m : ens.modes) {
    const double phase = dot(m.khat, r) * (m.omega / units::c) - m.omega * t;
    const double cp = std::cos(phase);
    const double sp = std::sin(phase);
    a += (m.amplitude_scale / m.omega) *
         ((m.a1 * sp + m.b1 * cp) * m.eps1 + (m.a2 * sp + m.b2 * cp) * m.eps2);
  }
  return a;
}

Vec3 efield_full(const ModeEnsemble& ens, const Vec3& r, double t) {
  // -dA/dt: d/dt sin(k.r - wt) = -w cos(...), d/dt cos(k.r - wt) = +w sin(...).
  Vec3 e;
  for (const Mode& m : ens.modes) {
    const double phase = dot(m.khat, r) * (m.omega / units::c) - m.omega * t;
    const double cp = std::cos(phase);
    const double sp = std::sin(phase);
    e += m.amplitude_scale *
         ((m.a1 * cp - m.b1 * sp) * m.eps1 + (m.a2 * cp - m.b2 * sp) * m.eps2);
  }
  return e;
}

double window_energy_density(const FieldSpec& spec) {
  // Integral of hbar w^3 / (2 pi^2 c^3) over the window.
  const double c3 = units::c * units::c * units::c;
  const double quartic = std::pow(spec.omega_max, 4) - std::pow(spec.omega_min, 4);
  return spec.energy_scale * units::hbar * quartic / (8.0 * units::pi * units::pi * c3);
}

DipoleField::DipoleField(const ModeEnsemble& ens) {
  for (const Mode& m : ens.modes) {
    // Modes arrive grouped by cell; exact equality keeps hand-built ensembles
    // correct (they just collapse less).
    if (omega.empty() || omega.back() != m.omega) {
      omega.push_back(m.omega);
      C.emplace_back();
      S.emplace_back();
    }
    C.back() += m.amplitude_scale * (m.a1 * m.eps1 + m.a2 * m.eps2);
    S.back() += m.amplitude_scale * (m.b1 * m.eps1 + m.b2 * m.eps2);
  }
}

double DipoleField::max_omega() const {
  double w = 0.0;
  for (double wi : omega) w = std::fmax(w, wi);
  return w;
}

void DipoleField::eval(double t, Vec3& e, Vec3& edot) const {
  e = Vec3{};
  edot = Vec3{};
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double cw = std::cos(omega[i] * t);
    const double sw = std::sin(omega[i] * t);
    e += C[i] * cw + S[i] * sw;
    edot += omega[i] * (S[i] * cw - C[i] * sw);
  }
}

DipoleFieldWalker::DipoleFieldWalker(const DipoleField& field, double t0, double h)
    : field_(&field), t0_(t0), h_(h) {
  const std::size_t n = field.omega.size();
  c_.resize(n);
  s_.resize(n);
  ch_.resize(n);
  sh_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ch_[i] = std::cos(field.omega[i] * h);
    sh_[i] = std::sin(field.omega[i] * h);
  }
  resync();
}

void DipoleFieldWalker::resync() {
  const double t = time();
  for (std::size_t i = 0; i < field_->omega.size(); ++i) {
    c_[i] = std::cos(field_->omega[i] * t);
    s_[i] = std::sin(field_->omega[i] * t);
  }
}

void DipoleFieldWalker::advance() {
  ++k_;
  if (k_ % kResyncEvery == 0) {
    resync();
    return;
  }
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const double c = c_[i];
    const double s = s_[i];
    c_[i] = c * ch_[i] - s * sh_[i];
    s_[i] = s * ch_[i] + c * sh_[i];
  }
}

void DipoleFieldWalker::value(Vec3& e, Vec3& edot) const {
  e = Vec3{};
  edot = Vec3{};
  for (std::size_t i = 0; i < c_.size(); ++i) {
    e += field_->C[i] * c_[i] + field_->S[i] * s_[i];
    edot += field_->omega[i] * (field_->S[i] * c_[i] - field_->C[i] * s_[i]);
  }
}

}  // namespace sedlab

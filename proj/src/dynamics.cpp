#include "sedlab/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace sedlab {

namespace {

constexpr double kDivergeRadius = 1e-3;  // coulomb runs below this are lost

// Position/velocity plus the running energy integrals, advanced together so
// the bookkeeping closes to integrator order.
struct AugState {
  Vec3 r, v;
  double win = 0.0, wrad = 0.0, wrr = 0.0;
};

struct Deriv {
  Vec3 dr, dv;
  double dwin, dwrad, dwrr;
};

Deriv eval_deriv(const PotentialModel& model, const Vec3& r, const Vec3& v,
                 const Vec3& e, const Vec3& edot, double tau) {
  const Vec3 fb = binding_force(model, r);
  const Vec3 frr = tau * (binding_force_rate(model, r, v) + edot);
  const Vec3 acc = fb + frr + e;  // field force convention: +E (input power E.v)
  return {v, acc, dot(e, v), tau * norm2(acc), dot(frr, v)};
}

// One RK4 step given the field at the three stage times t, t+dt/2, t+dt.
void rk4_step(AugState& y, const PotentialModel& model, double dt, const Vec3 e[3],
              const Vec3 edot[3], double tau) {
  const Deriv k1 = eval_deriv(model, y.r, y.v, e[0], edot[0], tau);
  const double h2 = 0.5 * dt;
  const Deriv k2 =
      eval_deriv(model, y.r + h2 * k1.dr, y.v + h2 * k1.dv, e[1], edot[1], tau);
  const Deriv k3 =
      eval_deriv(model, y.r + h2 * k2.dr, y.v + h2 * k2.dv, e[1], edot[1], tau);
  const Deriv k4 = eval_deriv(model, y.r + dt * k3.dr, y.v + dt * k3.dv, e[2], edot[2], tau);
  const double w = dt / 6.0;
  y.r += w * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
  y.v += w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  y.win += w * (k1.dwin + 2.0 * k2.dwin + 2.0 * k3.dwin + k4.dwin);
  y.wrad += w * (k1.dwrad + 2.0 * k2.dwrad + 2.0 * k3.dwrad + k4.dwrad);
  y.wrr += w * (k1.dwrr + 2.0 * k2.dwrr + 2.0 * k3.dwrr + k4.dwrr);
}

}  // namespace

void PotentialModel::validate() const {
  if (kind == PotentialKind::harmonic && !(omega > 0.0))
    throw std::invalid_argument("PotentialModel: harmonic omega must be > 0");
}

Vec3 binding_force(const PotentialModel& model, const Vec3& r) {
  switch (model.kind) {
    case PotentialKind::coulomb: {
      const double rr = norm(r);
      if (!(rr > 0.0))
        throw std::domain_error("binding_force: coulomb potential is singular at r = 0");
      return -1.0 / (rr * rr * rr) * r;
    }
    case PotentialKind::harmonic:
      return -(model.omega * model.omega) * r;
    case PotentialKind::free_motion:
      return {0.0, 0.0, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

Vec3 binding_force_rate(const PotentialModel& model, const Vec3& r, const Vec3& v) {
  switch (model.kind) {
    case PotentialKind::coulomb: {
      const double rr = norm(r);
      if (!(rr > 0.0))
        throw std::domain_error("binding_force: coulomb potential is singular at r = 0");
      const double r3 = rr * rr * rr;
      const double r5 = r3 * rr * rr;
      return -1.0 / r3 * v + (3.0 * dot(r, v) / r5) * r;
    }
    case PotentialKind::harmonic:
      return -(model.omega * model.omega) * v;
    case PotentialKind::free_motion:
      return {0.0, 0.0, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

Vec3 radiation_reaction(const PotentialModel& model, const ParticleState& state,
                        const Vec3& e_field_dot, double tau) {
  return tau * (binding_force_rate(model, state.r, state.v) + e_field_dot);
}

double mechanical_energy(const PotentialModel& model, const Vec3& r, const Vec3& v) {
  const double kin = 0.5 * norm2(v);
  switch (model.kind) {
    case PotentialKind::coulomb:
      return kin - 1.0 / norm(r);
    case PotentialKind::harmonic:
      return kin + 0.5 * model.omega * model.omega * norm2(r);
    case PotentialKind::free_motion:
      return kin;
  }
  return kin;
}

ParticleState step(const ParticleState& state, double dt, const PotentialModel& model,
                   const ModeEnsemble& ensemble, double tau) {
  model.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  if (!ensemble.modes.empty()) {
    const double wmax = ensemble.modes.back().omega;
    if (dt > 0.05 * (2.0 * units::pi / wmax))
      throw std::invalid_argument("step: dt exceeds 0.05 * (2 pi / omega_max) of the ensemble");
  }

  const DipoleField field(ensemble);
  Vec3 e[3], edot[3];
  field.eval(state.t, e[0], edot[0]);
  field.eval(state.t + 0.5 * dt, e[1], edot[1]);
  field.eval(state.t + dt, e[2], edot[2]);

  AugState y{state.r, state.v, 0.0, 0.0, 0.0};
  rk4_step(y, model, dt, e, edot, tau);
  return {y.r, y.v, state.t + dt};
}

void IntegrationPlan::validate() const {
  model.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("IntegrationPlan: dt must be > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("IntegrationPlan: t_end must be >= 0");
  if (stride_steps < 1) throw std::invalid_argument("IntegrationPlan: stride_steps must be >= 1");
  if (!(r_ionize > 0.0)) throw std::invalid_argument("IntegrationPlan: r_ionize must be > 0");
  if (!(tau >= 0.0)) throw std::invalid_argument("IntegrationPlan: tau must be >= 0");
  if (field_on) {
    field.validate();
    if (dt > 0.05 * (2.0 * units::pi / field.omega_max))
      throw std::invalid_argument("IntegrationPlan: dt exceeds 0.05 * (2 pi / omega_max)");
  }
  if (init == Init::circular_orbit) {
    if (!(init_radius > 0.0))
      throw std::invalid_argument("IntegrationPlan: init_radius must be > 0");
    if (model.kind == PotentialKind::free_motion)
      throw std::invalid_argument("IntegrationPlan: circular_orbit needs a binding potential");
  }
  if (init == Init::stationary_gaussian && model.kind != PotentialKind::harmonic)
    throw std::invalid_argument("IntegrationPlan: stationary_gaussian init is harmonic-only");
}

namespace {

ParticleState draw_initial(const IntegrationPlan& plan, Rng& rng) {
  ParticleState s;
  switch (plan.init) {
    case IntegrationPlan::Init::circular_orbit: {
      const Vec3 normal = rng.unit_vector();
      Vec3 e1, e2;
      polarization_basis(normal, e1, e2);
      const double r0 = plan.init_radius;
      const double vmag = plan.model.kind == PotentialKind::coulomb
                              ? 1.0 / std::sqrt(r0)
                              : plan.model.omega * r0;
      s.r = r0 * e1;
      s.v = vmag * e2;
      break;
    }
    case IntegrationPlan::Init::stationary_gaussian: {
      const double w = plan.model.omega;
      const double sr = std::sqrt(0.5 / w);
      const double sv = std::sqrt(0.5 * w);
      s.r = {sr * rng.normal(), sr * rng.normal(), sr * rng.normal()};
      s.v = {sv * rng.normal(), sv * rng.normal(), sv * rng.normal()};
      break;
    }
    case IntegrationPlan::Init::fixed:
      s = plan.init_state;
      break;
  }
  s.t = 0.0;
  return s;
}

}  // namespace

Trajectory simulate_trajectory(const IntegrationPlan& plan, Rng& rng) {
  plan.validate();

  const ModeEnsemble ens =
      plan.field_on ? sample_modes(plan.field, rng) : ModeEnsemble::empty();
  const DipoleField field(ens);
  const ParticleState init = draw_initial(plan, rng);

  Trajectory out;
  AugState y{init.r, init.v, 0.0, 0.0, 0.0};

  const long n_steps = std::lround(plan.t_end / plan.dt);
  DipoleFieldWalker walker(field, 0.0, 0.5 * plan.dt);

  Vec3 e_cur, edot_cur;
  walker.value(e_cur, edot_cur);

  auto record = [&](double t, const Vec3& e, const Vec3& edot) {
    const Deriv d = eval_deriv(plan.model, y.r, y.v, e, edot, plan.tau);
    out.samples.push_back({{y.r, y.v, t}, d.dwin, d.dwrad});
    out.ledger.push(t, y.win, y.wrad, mechanical_energy(plan.model, y.r, y.v), y.wrr);
  };

  record(0.0, e_cur, edot_cur);

  for (long k = 0; k < n_steps; ++k) {
    Vec3 e[3], edot[3];
    e[0] = e_cur;
    edot[0] = edot_cur;
    walker.advance();
    walker.value(e[1], edot[1]);
    walker.advance();
    walker.value(e[2], edot[2]);

    try {
      rk4_step(y, plan.model, plan.dt, e, edot, plan.tau);
    } catch (const std::domain_error&) {  // stage landed exactly on the singularity
      out.status = TrajStatus::diverged;
      return out;
    }
    e_cur = e[2];
    edot_cur = edot[2];
    const double t = (k + 1) * plan.dt;

    if (!(sedlab::finite(y.r) && sedlab::finite(y.v)) ||
        (plan.model.kind == PotentialKind::coulomb && norm(y.r) < kDivergeRadius)) {
      out.status = TrajStatus::diverged;
      return out;
    }
    if (norm(y.r) > plan.r_ionize) {
      record(t, e_cur, edot_cur);
      out.status = TrajStatus::ionized;
      return out;
    }
    if ((k + 1) % plan.stride_steps == 0 || k + 1 == n_steps) record(t, e_cur, edot_cur);
  }

  out.status = TrajStatus::completed;
  return out;
}

}  // namespace sedlab

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "sedlab/harness.hpp"

namespace py = pybind11;
using namespace sedlab;

namespace {

Vec3 to_vec(const py::sequence& s) {
  if (py::len(s) != 3) throw std::invalid_argument("expected a 3-sequence (x, y, z)");
  return {s[0].cast<double>(), s[1].cast<double>(), s[2].cast<double>()};
}

py::tuple from_vec(const Vec3& v) { return py::make_tuple(v.x, v.y, v.z); }

// A particle is a preset name ("electron", "proton", "neutron") or a dict
// with any of: z, g_factor, mass, spin, moment (moment wins over g_factor).
ParticleEM resolve_particle(const py::object& p) {
  if (py::isinstance<py::str>(p)) return particle_preset(p.cast<std::string>());
  if (py::isinstance<py::dict>(p)) {
    const py::dict d = p.cast<py::dict>();
    ParticleEM out;
    out.g = 0.0;
    for (const auto& item : d) {
      const std::string key = item.first.cast<std::string>();
      if (key == "z") out.z = item.second.cast<int>();
      else if (key == "g_factor") out.g = item.second.cast<double>();
      else if (key == "mass") out.mass = item.second.cast<double>();
      else if (key == "spin") out.spin = to_vec(item.second.cast<py::sequence>());
      else if (key == "moment") out.moment_override = to_vec(item.second.cast<py::sequence>());
      else throw std::invalid_argument("particle dict: unknown key '" + key + "'");
    }
    out.validate();
    return out;
  }
  throw std::invalid_argument("particle: pass a preset name or a dict");
}

const char* status_name(TrajStatus s) {
  switch (s) {
    case TrajStatus::completed: return "completed";
    case TrajStatus::ionized: return "ionized";
    default: return "diverged";
  }
}

RunConfig config_from(const std::string& experiment, const std::vector<std::string>& overrides,
                      const std::string& out_dir) {
  std::vector<std::string> all = overrides;
  if (!out_dir.empty()) all.push_back("out_dir=" + out_dir);
  return parse_config(experiment, "", all);
}

}  // namespace

PYBIND11_MODULE(_sedlab, m) {
  m.doc() = "classical zero-point field simulations of a bound charge";

  m.attr("c") = units::c;
  m.attr("alpha") = units::alpha;
  m.attr("eps0") = units::eps0;
  m.attr("tau_e") = units::tau_e;

  m.def("spectral_density", &spectral_density, py::arg("omega"),
        py::arg("hbar") = units::hbar, py::arg("c") = units::c,
        "Zero-point spectral energy density hbar omega^3 / (2 pi^2 c^3).");

  py::class_<FieldSpec>(m, "FieldSpec")
      .def(py::init<>())
      .def_readwrite("omega_min", &FieldSpec::omega_min)
      .def_readwrite("omega_max", &FieldSpec::omega_max)
      .def_readwrite("n_freq", &FieldSpec::n_freq)
      .def_readwrite("n_dir", &FieldSpec::n_dir)
      .def_readwrite("jitter", &FieldSpec::jitter)
      .def_readwrite("seed", &FieldSpec::seed)
      .def_readwrite("energy_scale", &FieldSpec::energy_scale);

  py::class_<ModeEnsemble>(m, "ModeEnsemble")
      .def_property_readonly(
          "n_modes", [](const ModeEnsemble& e) { return e.modes.size(); })
      .def("omegas", [](const ModeEnsemble& e) {
        std::vector<double> w;
        w.reserve(e.modes.size());
        for (const Mode& mode : e.modes) w.push_back(mode.omega);
        return w;
      });

  m.def(
      "sample_modes",
      [](const FieldSpec& spec, std::uint64_t seed) {
        Rng rng(seed);
        return sample_modes(spec, rng);
      },
      py::arg("spec"), py::arg("seed") = 1,
      "Draw a finite mode ensemble; identical (spec, seed) give identical modes.");

  m.def(
      "efield_dipole",
      [](const ModeEnsemble& e, double t) { return from_vec(efield_dipole(e, t)); },
      py::arg("ensemble"), py::arg("t"));
  m.def(
      "efield",
      [](const ModeEnsemble& e, const py::sequence& r, double t) {
        return from_vec(efield_full(e, to_vec(r), t));
      },
      py::arg("ensemble"), py::arg("r"), py::arg("t"));
  m.def(
      "afield",
      [](const ModeEnsemble& e, const py::sequence& r, double t) {
        return from_vec(afield_full(e, to_vec(r), t));
      },
      py::arg("ensemble"), py::arg("r"), py::arg("t"));
  m.def("window_energy_density", &window_energy_density, py::arg("spec"),
        "Target eps0 <E^2> for ensembles drawn from this spec.");

  m.def(
      "magnetic_moment",
      [](const py::object& particle) { return from_vec(magnetic_moment(resolve_particle(particle))); },
      py::arg("particle"));

  m.def(
      "near_field",
      [](const py::object& particle, const py::sequence& rhat, double r, const py::sequence& v,
         const py::sequence& a) {
        const FieldAtPoint f =
            near_field(resolve_particle(particle), normalized(to_vec(rhat)), r, to_vec(v), to_vec(a));
        py::dict d;
        d["e_charge"] = from_vec(f.e_charge);
        d["e_rad"] = from_vec(f.e_rad);
        d["b_dipole"] = from_vec(f.b_dipole);
        d["b_lorentz"] = from_vec(f.b_lorentz);
        d["b_rad"] = from_vec(f.b_rad);
        d["total_e"] = from_vec(f.total_e);
        d["total_b"] = from_vec(f.total_b);
        return d;
      },
      py::arg("particle"), py::arg("rhat"), py::arg("r"),
      py::arg("v") = py::make_tuple(0.0, 0.0, 0.0),
      py::arg("a") = py::make_tuple(0.0, 0.0, 0.0),
      "Per-term near fields of a moving point particle at r * rhat.");

  m.def(
      "larmor_power",
      [](const py::sequence& a, double tau) { return larmor_power(to_vec(a), tau); },
      py::arg("a"), py::arg("tau") = units::tau_e);
  m.def(
      "input_power",
      [](const py::sequence& e, const py::sequence& v) { return input_power(to_vec(e), to_vec(v)); },
      py::arg("e"), py::arg("v"));
  m.def("qm_ground_state_radial", &qm_ground_state_radial, py::arg("r"),
        "Reference radial density 4 r^2 exp(-2r).");
  m.def("gaussian_reference", &gaussian_reference, py::arg("x"), py::arg("omega"),
        "Reference stationary position density sqrt(omega/pi) exp(-omega x^2).");

  m.def(
      "run",
      [](const std::string& experiment, const std::vector<std::string>& overrides,
         const std::string& out_dir) {
        const RunConfig cfg = config_from(experiment, overrides, out_dir);
        const RunRecord rec = run_experiment(cfg);
        py::dict d;
        d["experiment"] = cfg.experiment;
        d["out_dir"] = cfg.out_dir;
        d["completed"] = rec.counts.completed;
        d["ionized"] = rec.counts.ionized;
        d["diverged"] = rec.counts.diverged;
        d["csv_files"] = rec.csv_paths;
        return d;
      },
      py::arg("experiment"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("out_dir") = std::string{},
      "Run one experiment; overrides are 'key=value' strings as for the CLI.");

  m.def(
      "trajectory",
      [](const std::string& experiment, const std::vector<std::string>& overrides,
         std::uint64_t index) {
        const RunConfig cfg = config_from(experiment, overrides, "");
        Rng rng(mix_seed(cfg.seed, index));
        const Trajectory tr = simulate_trajectory(cfg, rng);
        std::vector<double> t;
        std::vector<py::tuple> r, v;
        t.reserve(tr.samples.size());
        for (const TrajectorySample& s : tr.samples) {
          t.push_back(s.state.t);
          r.push_back(from_vec(s.state.r));
          v.push_back(from_vec(s.state.v));
        }
        py::dict ledger;
        ledger["t"] = tr.ledger.t;
        ledger["work_in"] = tr.ledger.work_in;
        ledger["radiated"] = tr.ledger.radiated;
        ledger["mech"] = tr.ledger.mech;
        py::dict d;
        d["status"] = status_name(tr.status);
        d["t"] = t;
        d["r"] = r;
        d["v"] = v;
        d["ledger"] = ledger;
        return d;
      },
      py::arg("experiment"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("index") = 0,
      "Integrate one trajectory (stream index `index`) and return its samples.");
}

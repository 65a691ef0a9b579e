#include "sedlab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sedlab {

namespace {

constexpr const char* kCodeVersion = "sedlab 0.1.0";

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": cannot parse '" + value +
                                "' as a number");
  }
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": cannot parse '" + value +
                                "' as an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key " + key + ": cannot parse '" + value +
                                "' as an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config key " + key + ": cannot parse '" + value +
                              "' as a boolean (use true/false)");
}

bool is_trajectory_experiment(const std::string& e) {
  return e == "hydrogen" || e == "oscillator" || e == "inspiral";
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

RunConfig default_config(const std::string& experiment) {
  RunConfig cfg;
  cfg.experiment = experiment;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  cfg.field.jitter = 0.9;
  const double period = 2.0 * units::pi;

  if (experiment == "oscillator") {
    cfg.field_on = true;
    cfg.omega = 1.0;
    cfg.n_traj = 200;
    cfg.t_end = 100.0 * period;
    cfg.stride = period;
    cfg.burn_in = 50.0 * period;
    cfg.coupling_scale = 20000.0;
    cfg.init = "gaussian";
  } else if (experiment == "hydrogen") {
    cfg.field_on = true;
    cfg.field.n_freq = 3000;  // pushes the recurrence time past t_end
    cfg.n_traj = 50;
    cfg.t_end = 1000.0 * period;
    cfg.stride = 0.25 * period;
    cfg.burn_in = 50.0 * period;
    cfg.init = "circular";
  } else if (experiment == "inspiral") {
    cfg.field_on = false;
    cfg.n_traj = 1;
    cfg.t_end = 1000.0 * period;
    cfg.stride = period;
    cfg.burn_in = 0.0;
    cfg.init = "circular";
  } else if (experiment == "field-check") {
    cfg.field_on = true;
    cfg.n_traj = 10000;  // ensemble resamples
  } else if (experiment == "nearfield") {
    cfg.field_on = false;
    cfg.n_traj = 1;
  } else {
    throw std::invalid_argument(
        "unknown experiment '" + experiment +
        "' (choices: hydrogen, oscillator, field-check, nearfield, inspiral)");
  }
  return cfg;
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto& nf = cfg.nearfield;
  const auto custom = [&] { nf.particle = "custom"; };

  if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "n_traj") cfg.n_traj = static_cast<int>(parse_int(key, value));
  else if (key == "t_end") cfg.t_end = parse_double(key, value);
  else if (key == "dt") cfg.dt = parse_double(key, value);
  else if (key == "stride") cfg.stride = parse_double(key, value);
  else if (key == "burn_in") cfg.burn_in = parse_double(key, value);
  else if (key == "r_ionize") cfg.r_ionize = parse_double(key, value);
  else if (key == "coupling_scale") cfg.coupling_scale = parse_double(key, value);
  else if (key == "init") cfg.init = value;
  else if (key == "init_radius") cfg.init_radius = parse_double(key, value);
  else if (key == "omega") cfg.omega = parse_double(key, value);
  else if (key == "omega_min") cfg.field.omega_min = parse_double(key, value);
  else if (key == "omega_max") cfg.field.omega_max = parse_double(key, value);
  else if (key == "n_freq") cfg.field.n_freq = static_cast<int>(parse_int(key, value));
  else if (key == "n_dir") cfg.field.n_dir = static_cast<int>(parse_int(key, value));
  else if (key == "jitter") cfg.field.jitter = parse_double(key, value);
  else if (key == "allow_recurrence") cfg.allow_recurrence = parse_bool(key, value);
  else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, value));
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "particle") nf.particle = value;
  else if (key == "z") { custom(); nf.custom.z = static_cast<int>(parse_int(key, value)); }
  else if (key == "g_factor") { custom(); nf.custom.g = parse_double(key, value); }
  else if (key == "mass") { custom(); nf.custom.mass = parse_double(key, value); }
  else if (key == "spin_x") { custom(); nf.custom.spin.x = parse_double(key, value); }
  else if (key == "spin_y") { custom(); nf.custom.spin.y = parse_double(key, value); }
  else if (key == "spin_z") { custom(); nf.custom.spin.z = parse_double(key, value); }
  else if (key == "rhat_x") nf.rhat.x = parse_double(key, value);
  else if (key == "rhat_y") nf.rhat.y = parse_double(key, value);
  else if (key == "rhat_z") nf.rhat.z = parse_double(key, value);
  else if (key == "r") nf.r = parse_double(key, value);
  else if (key == "v_x") nf.v.x = parse_double(key, value);
  else if (key == "v_y") nf.v.y = parse_double(key, value);
  else if (key == "v_z") nf.v.z = parse_double(key, value);
  else if (key == "a_x") nf.a.x = parse_double(key, value);
  else if (key == "a_y") nf.a.y = parse_double(key, value);
  else if (key == "a_z") nf.a.z = parse_double(key, value);
  else
    throw std::invalid_argument("unknown config key '" + key + "'");
}

double resolve_dt(const RunConfig& cfg) {
  double base = std::numeric_limits<double>::infinity();
  if (cfg.field_on) base = 2.0 * units::pi / cfg.field.omega_max;
  if (cfg.experiment == "oscillator")
    base = std::min(base, 2.0 * units::pi / cfg.omega);
  else if (cfg.experiment == "hydrogen" || cfg.experiment == "inspiral")
    base = std::min(base, 2.0 * units::pi * std::pow(cfg.init_radius, 1.5));
  if (!std::isfinite(base))
    throw std::invalid_argument("config key dt: no automatic policy applies; set dt explicitly");
  return base / 200.0;
}

void validate_config(const RunConfig& cfg) {
  require(cfg.n_traj >= 1, "config key n_traj: must be >= 1");

  const bool uses_field = cfg.field_on || cfg.experiment == "field-check";
  if (uses_field) {
    require(cfg.field.omega_min > 0.0, "config key omega_min: must be > 0");
    require(cfg.field.omega_max > cfg.field.omega_min,
            "config keys omega_min/omega_max: need omega_min (" + g17(cfg.field.omega_min) +
                ") < omega_max (" + g17(cfg.field.omega_max) + ")");
    require(cfg.field.n_freq >= 1, "config key n_freq: must be >= 1");
    require(cfg.field.n_dir >= 1, "config key n_dir: must be >= 1");
    require(cfg.field.jitter >= 0.0 && cfg.field.jitter < 1.0,
            "config key jitter: must lie in [0, 1)");
    require(cfg.coupling_scale > 0.0, "config key coupling_scale: must be > 0");
  }

  if (is_trajectory_experiment(cfg.experiment)) {
    require(cfg.t_end >= 0.0, "config key t_end: must be >= 0");
    require(cfg.stride > 0.0, "config key stride: must be > 0");
    require(cfg.burn_in >= 0.0, "config key burn_in: must be >= 0");
    require(cfg.r_ionize > 0.0, "config key r_ionize: must be > 0");
    require(cfg.coupling_scale > 0.0, "config key coupling_scale: must be > 0");
    require(cfg.init == "circular" || cfg.init == "gaussian",
            "config key init: must be 'circular' or 'gaussian'");
    require(cfg.init == "circular" || cfg.experiment == "oscillator",
            "config key init: 'gaussian' draws a stationary oscillator state and "
            "needs the oscillator experiment");
    require(cfg.init_radius > 0.0, "config key init_radius: must be > 0");
    if (cfg.experiment == "oscillator")
      require(cfg.omega > 0.0, "config key omega: must be > 0");
    require(cfg.dt > 0.0, "config key dt: must be > 0");
    if (cfg.field_on) {
      const double cap = 0.05 * 2.0 * units::pi / cfg.field.omega_max;
      require(cfg.dt <= cap, "config key dt: " + g17(cfg.dt) +
                                 " exceeds 0.05 * (2 pi / omega_max) = " + g17(cap));
      if (!cfg.allow_recurrence) {
        const double t_rec =
            2.0 * units::pi * cfg.field.n_freq / (cfg.field.omega_max - cfg.field.omega_min);
        require(cfg.t_end < t_rec,
                "config key t_end: " + g17(cfg.t_end) +
                    " reaches the mode-sum recurrence time 2 pi n_freq / (omega_max - "
                    "omega_min) = " +
                    g17(t_rec) + "; raise n_freq, shorten t_end, or pass --allow-recurrence");
      }
    }
  }

  if (cfg.experiment == "nearfield") {
    require(cfg.nearfield.r > 0.0, "config key r: must be > 0");
    require(norm(cfg.nearfield.rhat) > 0.0, "config keys rhat_x/y/z: zero direction");
    if (cfg.nearfield.particle == "custom")
      require(cfg.nearfield.custom.mass > 0.0, "config key mass: must be > 0");
  }
}

RunConfig parse_config(const std::string& experiment, const std::string& config_path,
                       const std::vector<std::string>& overrides) {
  RunConfig cfg = default_config(experiment);

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("config file not found: " + config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument(config_path + ":" + std::to_string(line_no) +
                                    ": expected key = value");
      apply_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override '" + kv + "': expected key=value");
    apply_kv(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }

  if (is_trajectory_experiment(cfg.experiment) && cfg.dt <= 0.0) cfg.dt = resolve_dt(cfg);
  if (cfg.workers < 1) cfg.workers = 1;
  validate_config(cfg);
  return cfg;
}

IntegrationPlan make_plan(const RunConfig& cfg) {
  IntegrationPlan plan;
  plan.model = cfg.experiment == "oscillator" ? PotentialModel::harmonic(cfg.omega)
                                              : PotentialModel::coulomb();
  plan.field = cfg.field;
  plan.field.energy_scale = cfg.coupling_scale;
  plan.field_on = cfg.field_on;
  plan.t_end = cfg.t_end;
  plan.dt = cfg.dt;
  plan.stride_steps = std::max(1L, std::lround(cfg.stride / cfg.dt));
  plan.r_ionize = cfg.r_ionize;
  plan.tau = cfg.coupling_scale * units::tau_e;
  plan.init = cfg.init == "gaussian" ? IntegrationPlan::Init::stationary_gaussian
                                     : IntegrationPlan::Init::circular_orbit;
  plan.init_radius = cfg.init_radius;
  return plan;
}

Trajectory simulate_trajectory(const RunConfig& cfg, Rng& rng) {
  return simulate_trajectory(make_plan(cfg), rng);
}

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger) {
  std::ofstream out = open_out(path);
  out << "t,work_in,radiated,mech\n";
  for (std::size_t i = 0; i < ledger.size(); ++i)
    out << g17(ledger.t[i]) << ',' << g17(ledger.work_in[i]) << ',' << g17(ledger.radiated[i])
        << ',' << g17(ledger.mech[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_histogram_csv(const std::string& path, const Histogram1D& hist,
                         const std::vector<double>& reference_masses) {
  std::ofstream out = open_out(path);
  out << "bin_lo,bin_hi,density,reference_density\n";
  for (std::size_t b = 0; b < hist.n_bins(); ++b) {
    const double width = hist.edges[b + 1] - hist.edges[b];
    const double ref = b < reference_masses.size() ? reference_masses[b] / width : 0.0;
    out << g17(hist.edges[b]) << ',' << g17(hist.edges[b + 1]) << ',' << g17(hist.density(b))
        << ',' << g17(ref) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, double>>& rows) {
  std::ofstream out = open_out(path);
  out << "key,value\n";
  for (const auto& [key, value] : rows) out << key << ',' << g17(value) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

namespace {

// Deterministic work pool: trajectory index -> seeded stream, results merged
// by index regardless of which worker ran what.
template <typename Job>
void run_pool(int n_jobs, int workers, Job job) {
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto body = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const long i = next.fetch_add(1);
      if (i >= n_jobs) return;
      try {
        job(static_cast<int>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min(workers, n_jobs));
  if (n_threads == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> linspace_edges(double lo, double hi, int n_bins) {
  std::vector<double> e(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i) e[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n_bins;
  return e;
}

void write_config_echo(const std::string& path, const RunConfig& cfg) {
  std::ofstream out = open_out(path);
  out << "experiment=" << cfg.experiment << '\n';
  out << "seed=" << cfg.seed << '\n';
  if (cfg.experiment == "nearfield") {
    const NearfieldCase& nf = cfg.nearfield;
    out << "particle=" << nf.particle << '\n';
    if (nf.particle == "custom") {
      out << "z=" << nf.custom.z << '\n';
      out << "g_factor=" << g17(nf.custom.g) << '\n';
      out << "mass=" << g17(nf.custom.mass) << '\n';
      out << "spin_x=" << g17(nf.custom.spin.x) << '\n';
      out << "spin_y=" << g17(nf.custom.spin.y) << '\n';
      out << "spin_z=" << g17(nf.custom.spin.z) << '\n';
    }
    out << "rhat_x=" << g17(nf.rhat.x) << '\n';
    out << "rhat_y=" << g17(nf.rhat.y) << '\n';
    out << "rhat_z=" << g17(nf.rhat.z) << '\n';
    out << "r=" << g17(nf.r) << '\n';
    out << "v_x=" << g17(nf.v.x) << '\n';
    out << "v_y=" << g17(nf.v.y) << '\n';
    out << "v_z=" << g17(nf.v.z) << '\n';
    out << "a_x=" << g17(nf.a.x) << '\n';
    out << "a_y=" << g17(nf.a.y) << '\n';
    out << "a_z=" << g17(nf.a.z) << '\n';
  } else {
    out << "n_traj=" << cfg.n_traj << '\n';
    if (is_trajectory_experiment(cfg.experiment)) {
      out << "t_end=" << g17(cfg.t_end) << '\n';
      out << "dt=" << g17(cfg.dt) << '\n';
      out << "stride=" << g17(cfg.stride) << '\n';
      out << "burn_in=" << g17(cfg.burn_in) << '\n';
      out << "r_ionize=" << g17(cfg.r_ionize) << '\n';
      out << "init=" << cfg.init << '\n';
      out << "init_radius=" << g17(cfg.init_radius) << '\n';
      if (cfg.experiment == "oscillator") out << "omega=" << g17(cfg.omega) << '\n';
      out << "field_on=" << (cfg.field_on ? "true" : "false") << '\n';
    }
    out << "coupling_scale=" << g17(cfg.coupling_scale) << '\n';
    if (cfg.field_on || cfg.experiment == "field-check") {
      out << "omega_min=" << g17(cfg.field.omega_min) << '\n';
      out << "omega_max=" << g17(cfg.field.omega_max) << '\n';
      out << "n_freq=" << cfg.field.n_freq << '\n';
      out << "n_dir=" << cfg.field.n_dir << '\n';
      out << "jitter=" << g17(cfg.field.jitter) << '\n';
      out << "allow_recurrence=" << (cfg.allow_recurrence ? "true" : "false") << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_run_record(const std::string& path, const RunRecord& rec) {
  std::ofstream out = open_out(path);
  out << "code_version=" << rec.code_version << '\n';
  out << "experiment=" << rec.config.experiment << '\n';
  out << "seed=" << rec.config.seed << '\n';
  out << "seed_derivation=mix_seed(master_seed, trajectory_index)\n";
  out << "completed=" << rec.counts.completed << '\n';
  out << "ionized=" << rec.counts.ionized << '\n';
  out << "diverged=" << rec.counts.diverged << '\n';
  out << "csv_files=";
  for (std::size_t i = 0; i < rec.csv_paths.size(); ++i)
    out << (i ? "," : "") << rec.csv_paths[i];
  out << '\n';
  if (!rec.traj_seeds.empty()) {
    out << "traj_seeds=";
    for (std::size_t i = 0; i < rec.traj_seeds.size(); ++i)
      out << (i ? " " : "") << rec.traj_seeds[i];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

EnergyLedger mean_ledger(const std::vector<Trajectory>& trajs) {
  EnergyLedger mean;
  std::size_t rows = 0;
  int used = 0;
  for (const Trajectory& t : trajs) {
    if (t.status != TrajStatus::completed) continue;
    if (used == 0) {
      rows = t.ledger.size();
      mean.t = t.ledger.t;
      mean.work_in.assign(rows, 0.0);
      mean.radiated.assign(rows, 0.0);
      mean.mech.assign(rows, 0.0);
      mean.work_rr.assign(rows, 0.0);
    }
    if (t.ledger.size() != rows)
      throw std::runtime_error("mean_ledger: completed trajectories disagree on the grid");
    for (std::size_t i = 0; i < rows; ++i) {
      mean.work_in[i] += t.ledger.work_in[i];
      mean.radiated[i] += t.ledger.radiated[i];
      mean.mech[i] += t.ledger.mech[i];
      mean.work_rr[i] += t.ledger.work_rr[i];
    }
    ++used;
  }
  if (used > 1) {
    for (std::size_t i = 0; i < rows; ++i) {
      mean.work_in[i] /= used;
      mean.radiated[i] /= used;
      mean.mech[i] /= used;
      mean.work_rr[i] /= used;
    }
  }
  return mean;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

RunRecord run_experiment(const RunConfig& cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create out_dir " + cfg.out_dir + ": " + ec.message());
  const auto in_dir = [&](const std::string& name) { return cfg.out_dir + "/" + name; };

  RunRecord rec;
  rec.config = cfg;
  rec.code_version = kCodeVersion;

  write_config_echo(in_dir("config_echo.txt"), cfg);

  if (cfg.experiment == "field-check") {
    // Ensemble resamples of eps0 <E^2> at t = 0 against the window integral.
    std::vector<double> e2(static_cast<std::size_t>(cfg.n_traj), 0.0);
    FieldSpec spec = cfg.field;
    spec.energy_scale = cfg.coupling_scale;
    run_pool(cfg.n_traj, cfg.workers, [&](int i) {
      Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
      const ModeEnsemble ens = sample_modes(spec, rng);
      e2[static_cast<std::size_t>(i)] = norm2(efield_dipole(ens, 0.0));
    });
    double sum = 0.0;
    for (double v : e2) sum += v;
    const double measured = units::eps0 * sum / cfg.n_traj;
    const double target = window_energy_density(spec);
    write_report_csv(in_dir("report.csv"),
                     {{"n_resamples", static_cast<double>(cfg.n_traj)},
                      {"measured_energy_density", measured},
                      {"target_energy_density", target},
                      {"relative_error", std::fabs(measured - target) / target}});
    rec.csv_paths = {"report.csv"};
  } else if (cfg.experiment == "nearfield") {
    const NearfieldCase& nf = cfg.nearfield;
    const ParticleEM particle =
        nf.particle == "custom" ? nf.custom : particle_preset(nf.particle);
    const FieldAtPoint f = near_field(particle, normalized(nf.rhat), nf.r, nf.v, nf.a);
    std::ofstream out = open_out(in_dir("nearfield.csv"));
    out << "term,ex,ey,ez,bx,by,bz\n";
    const auto row = [&](const char* term, const Vec3& e, const Vec3& b) {
      out << term << ',' << g17(e.x) << ',' << g17(e.y) << ',' << g17(e.z) << ',' << g17(b.x)
          << ',' << g17(b.y) << ',' << g17(b.z) << '\n';
    };
    const Vec3 zero{0.0, 0.0, 0.0};
    row("e_charge", f.e_charge, zero);
    row("e_rad", f.e_rad, zero);
    row("b_dipole", zero, f.b_dipole);
    row("b_lorentz", zero, f.b_lorentz);
    row("b_rad", zero, f.b_rad);
    row("total_e", f.total_e, zero);
    row("total_b", zero, f.total_b);
    if (!out) throw std::runtime_error("write failed: " + in_dir("nearfield.csv"));
    rec.csv_paths = {"nearfield.csv"};
  } else {
    // Trajectory ensemble.
    const IntegrationPlan plan = make_plan(cfg);
    std::vector<Trajectory> trajs(static_cast<std::size_t>(cfg.n_traj));
    rec.traj_seeds.resize(static_cast<std::size_t>(cfg.n_traj));
    for (int i = 0; i < cfg.n_traj; ++i)
      rec.traj_seeds[static_cast<std::size_t>(i)] = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
    run_pool(cfg.n_traj, cfg.workers, [&](int i) {
      Rng rng(rec.traj_seeds[static_cast<std::size_t>(i)]);
      trajs[static_cast<std::size_t>(i)] = simulate_trajectory(plan, rng);
    });

    for (const Trajectory& t : trajs) {
      if (t.status == TrajStatus::completed) ++rec.counts.completed;
      else if (t.status == TrajStatus::ionized) ++rec.counts.ionized;
      else ++rec.counts.diverged;
    }

    const EnergyLedger mean = mean_ledger(trajs);
    if (mean.size() > 0) {
      write_ledger_csv(in_dir("ledger.csv"), mean);
      rec.csv_paths.push_back("ledger.csv");
    }

    ThroughputReport rep;
    bool have_rep = false;
    if (mean.size() >= 2) {
      try {
        rep = throughput_report(mean, cfg.burn_in, cfg.t_end);
        have_rep = true;
      } catch (const std::invalid_argument&) {
      }
    }

    if (cfg.experiment == "oscillator") {
      const double sigma = std::sqrt(0.5 / cfg.omega);
      Histogram1D hist(linspace_edges(-4.0 * sigma, 4.0 * sigma, 64));
      MomentAccumulator mom[3], pooled;
      for (const Trajectory& t : trajs) {
        if (t.status != TrajStatus::completed) continue;
        for (std::size_t i = 1; i < t.samples.size(); ++i) {
          const ParticleState& s = t.samples[i].state;
          if (s.t < cfg.burn_in) continue;
          const double w = s.t - t.samples[i - 1].state.t;
          hist.add(s.r.x, w);
          const double comp[3] = {s.r.x, s.r.y, s.r.z};
          for (int c = 0; c < 3; ++c) {
            mom[c].add(comp[c], w);
            pooled.add(comp[c], w);
          }
        }
      }
      const auto ref = [&](double x) { return gaussian_reference(x, cfg.omega); };
      write_histogram_csv(in_dir("position_x.csv"), hist,
                          bin_reference_masses(hist.edges, ref));
      rec.csv_paths.push_back("position_x.csv");
      write_report_csv(
          in_dir("report.csv"),
          {{"completed", static_cast<double>(rec.counts.completed)},
           {"ionized", static_cast<double>(rec.counts.ionized)},
           {"diverged", static_cast<double>(rec.counts.diverged)},
           {"variance_x", mom[0].variance()},
           {"variance_y", mom[1].variance()},
           {"variance_z", mom[2].variance()},
           {"variance_target", 0.5 / cfg.omega},
           {"excess_kurtosis", pooled.n > 0.0 ? pooled.excess_kurtosis() : nan_value()},
           {"mean_p_in", have_rep ? rep.mean_p_in : nan_value()},
           {"mean_p_rad", have_rep ? rep.mean_p_rad : nan_value()},
           {"mech_drift", have_rep ? rep.mech_drift : nan_value()},
           {"residual", have_rep ? rep.residual : nan_value()}});
      rec.csv_paths.push_back("report.csv");
    } else if (cfg.experiment == "hydrogen") {
      Histogram1D hist(linspace_edges(0.0, 6.0, 120));
      try {
        hist = radial_histogram(trajs, linspace_edges(0.0, 6.0, 120), cfg.burn_in);
      } catch (const std::runtime_error&) {
      }
      const auto ref = [](double r) { return qm_ground_state_radial(r); };
      write_histogram_csv(in_dir("radial.csv"), hist, bin_reference_masses(hist.edges, ref));
      rec.csv_paths.push_back("radial.csv");

      ComparisonMetrics metrics;
      bool have_metrics = false;
      if (hist.normalization > 0.0) {
        metrics = compare_distributions(hist, ref);
        have_metrics = true;
      }
      double peak_r = nan_value(), best = -1.0;
      for (std::size_t b = 0; b < hist.n_bins(); ++b)
        if (hist.density(b) > best) {
          best = hist.density(b);
          peak_r = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
        }
      double bound_time = 0.0;
      for (const Trajectory& t : trajs)
        bound_time += t.samples.empty() ? 0.0 : t.samples.back().state.t;
      write_report_csv(
          in_dir("report.csv"),
          {{"completed", static_cast<double>(rec.counts.completed)},
           {"ionized", static_cast<double>(rec.counts.ionized)},
           {"diverged", static_cast<double>(rec.counts.diverged)},
           {"bound_fraction", static_cast<double>(rec.counts.completed) / cfg.n_traj},
           {"mean_bound_time", bound_time / cfg.n_traj},
           {"peak_r", peak_r},
           {"peak_offset", have_metrics ? metrics.peak_offset : nan_value()},
           {"kl_divergence", have_metrics ? metrics.kl : nan_value()},
           {"l2_distance", have_metrics ? metrics.l2 : nan_value()},
           {"excluded_mass", have_metrics ? metrics.excluded_mass : nan_value()},
           {"mean_p_in", have_rep ? rep.mean_p_in : nan_value()},
           {"mean_p_rad", have_rep ? rep.mean_p_rad : nan_value()},
           {"mech_drift", have_rep ? rep.mech_drift : nan_value()},
           {"residual", have_rep ? rep.residual : nan_value()}});
      rec.csv_paths.push_back("report.csv");
    } else {  // inspiral
      const double tau = cfg.coupling_scale * units::tau_e;
      double delta_sim = nan_value(), delta_pred = nan_value(), rel_err = nan_value();
      if (mean.size() >= 2) {
        const double t_final = mean.t.back();
        const double r0 = cfg.init_radius;
        const double shrunk = r0 * r0 * r0 - 6.0 * tau * t_final;
        if (shrunk > 0.0) {
          const double r_pred = std::cbrt(shrunk);
          delta_pred = -0.5 / r_pred + 0.5 / r0;
          delta_sim = mean.mech.back() - mean.mech.front();
          rel_err = std::fabs(delta_sim - delta_pred) / std::fabs(delta_pred);
        }
      }
      write_report_csv(in_dir("report.csv"),
                       {{"completed", static_cast<double>(rec.counts.completed)},
                        {"ionized", static_cast<double>(rec.counts.ionized)},
                        {"diverged", static_cast<double>(rec.counts.diverged)},
                        {"delta_mech", delta_sim},
                        {"delta_mech_predicted", delta_pred},
                        {"relative_error", rel_err},
                        {"mean_p_rad", have_rep ? rep.mean_p_rad : nan_value()},
                        {"mech_drift", have_rep ? rep.mech_drift : nan_value()}});
      rec.csv_paths.push_back("report.csv");
    }
  }

  write_run_record(in_dir("run_record.txt"), rec);

  rec.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    // The one file that legitimately differs between reruns.
    std::ofstream out = open_out(in_dir("timing.txt"));
    char buf[64];
    std::snprintf(buf, sizeof buf, "wall_clock_seconds=%.3f\n", rec.wall_clock_seconds);
    out << buf << "workers=" << cfg.workers << '\n';
    if (!out) throw std::runtime_error("write failed: " + in_dir("timing.txt"));
  }
  return rec;
}

}  // namespace sedlab

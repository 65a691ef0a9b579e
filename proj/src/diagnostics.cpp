#include "sedlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sedlab/dynamics.hpp"

namespace sedlab {

double larmor_power(const Vec3& a, double tau) { return tau * norm2(a); }

double input_power(const Vec3& e_field, const Vec3& v) { return dot(e_field, v); }

ThroughputReport throughput_report(const EnergyLedger& ledger, double t_start,
                                   double t_end) {
  if (!(t_end > t_start))
    throw std::invalid_argument("throughput_report: window must satisfy t_end > t_start");

  std::size_t lo = 0;
  while (lo < ledger.size() && ledger.t[lo] < t_start) ++lo;
  std::size_t hi = ledger.size();
  while (hi > lo && ledger.t[hi - 1] > t_end) --hi;
  if (hi - lo < 2)
    throw std::invalid_argument(
        "throughput_report: window contains fewer than two ledger rows");

  const double span = ledger.t[hi - 1] - ledger.t[lo];
  ThroughputReport rep;
  rep.t_start = ledger.t[lo];
  rep.t_end = ledger.t[hi - 1];
  rep.mean_p_in = (ledger.work_in[hi - 1] - ledger.work_in[lo]) / span;
  rep.mean_p_rad = (ledger.radiated[hi - 1] - ledger.radiated[lo]) / span;

  // Least-squares slope of mechanical energy over the window.
  double tm = 0.0, em = 0.0;
  const double nw = static_cast<double>(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    tm += ledger.t[i];
    em += ledger.mech[i];
  }
  tm /= nw;
  em /= nw;
  double stt = 0.0, ste = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double dt = ledger.t[i] - tm;
    stt += dt * dt;
    ste += dt * (ledger.mech[i] - em);
  }
  rep.mech_drift = ste / stt;

  const double imbalance = std::fabs(rep.mean_p_in - rep.mean_p_rad - rep.mech_drift);
  if (rep.mean_p_rad > 0.0)
    rep.residual = imbalance / rep.mean_p_rad;
  else
    rep.residual = imbalance == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return rep;
}

Histogram1D::Histogram1D(std::vector<double> bin_edges) : edges(std::move(bin_edges)) {
  if (edges.size() < 2) throw std::invalid_argument("Histogram1D: need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw std::invalid_argument("Histogram1D: edges must increase strictly");
  counts.assign(edges.size() - 1, 0.0);
}

void Histogram1D::add(double x, double weight) {
  if (!(x >= edges.front()) || !(x < edges.back())) return;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
  counts[bin] += weight;
  normalization += weight;
}

void Histogram1D::merge(const Histogram1D& other) {
  if (other.edges != edges) throw std::invalid_argument("Histogram1D: merge needs equal edges");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  normalization += other.normalization;
}

double Histogram1D::density(std::size_t bin) const {
  if (normalization <= 0.0) return 0.0;
  return counts[bin] / (normalization * (edges[bin + 1] - edges[bin]));
}

namespace {

// Shared accumulation loop for the trajectory histograms: each post-burn-in
// sample is weighted by the time covered since the previous sample.
template <typename Value>
Histogram1D accumulate_samples(const std::vector<Trajectory>& trajectories,
                               std::vector<double> edges, double burn_in, Value value) {
  Histogram1D hist(std::move(edges));
  bool any = false;
  for (const Trajectory& traj : trajectories) {
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
      const ParticleState& s = traj.samples[i].state;
      if (s.t < burn_in) continue;
      any = true;
      hist.add(value(s), s.t - traj.samples[i - 1].state.t);
    }
  }
  if (!any)
    throw std::runtime_error("histogram: no trajectory samples past burn-in");
  return hist;
}

}  // namespace

Histogram1D radial_histogram(const std::vector<Trajectory>& trajectories,
                             std::vector<double> edges, double burn_in) {
  return accumulate_samples(trajectories, std::move(edges), burn_in,
                            [](const ParticleState& s) { return norm(s.r); });
}

Histogram1D position_histogram_1d(const std::vector<Trajectory>& trajectories, int axis,
                                  std::vector<double> edges, double burn_in) {
  if (axis < 0 || axis > 2)
    throw std::invalid_argument("position_histogram_1d: axis must be 0, 1, or 2");
  return accumulate_samples(trajectories, std::move(edges), burn_in,
                            [axis](const ParticleState& s) {
                              return axis == 0 ? s.r.x : axis == 1 ? s.r.y : s.r.z;
                            });
}

double qm_ground_state_radial(double r) {
  if (r < 0.0) throw std::domain_error("qm_ground_state_radial: r must be >= 0");
  return 4.0 * r * r * std::exp(-2.0 * r);
}

double gaussian_reference(double x, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("gaussian_reference: omega must be > 0");
  return std::sqrt(omega / units::pi) * std::exp(-omega * x * x);
}

std::vector<double> bin_reference_masses(const std::vector<double>& edges,
                                         const std::function<double(double)>& reference) {
  std::vector<double> q(edges.size() - 1, 0.0);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    // Composite Simpson per bin.
    const double a = edges[b], c = edges[b + 1];
    const int n = 64;
    const double h = (c - a) / n;
    double acc = reference(a) + reference(c);
    for (int i = 1; i < n; ++i) acc += reference(a + i * h) * (i % 2 ? 4.0 : 2.0);
    q[b] = acc * h / 3.0;
  }
  return q;
}

ComparisonMetrics compare_distributions(const Histogram1D& hist,
                                        const std::function<double(double)>& reference) {
  if (!(hist.normalization > 0.0))
    throw std::invalid_argument("compare_distributions: histogram is empty");

  const std::size_t nb = hist.n_bins();
  const std::vector<double> q = bin_reference_masses(hist.edges, reference);

  constexpr double kTinyReference = 1e-15;
  ComparisonMetrics m;
  double p_kept = 0.0, q_kept = 0.0;
  bool zero_on_occupied = false;
  for (std::size_t b = 0; b < nb; ++b) {
    const double p = hist.counts[b] / hist.normalization;
    if (q[b] == 0.0 && p > 0.0) zero_on_occupied = true;
    if (q[b] < kTinyReference) {
      m.excluded_mass += p;
      continue;
    }
    p_kept += p;
    q_kept += q[b];
  }

  double kl = 0.0, l2 = 0.0;
  double best_p = -1.0, best_q = -1.0, peak_p = 0.0, peak_q = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double width = hist.edges[b + 1] - hist.edges[b];
    const double center = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
    const double p_raw = hist.counts[b] / hist.normalization;
    if (p_raw / width > best_p) {
      best_p = p_raw / width;
      peak_p = center;
    }
    if (q[b] / width > best_q) {
      best_q = q[b] / width;
      peak_q = center;
    }
    if (q[b] < kTinyReference) continue;
    const double p = p_kept > 0.0 ? p_raw / p_kept : 0.0;
    const double qq = q[b] / q_kept;
    const double dd = p / width - qq / width;
    l2 += dd * dd * width;
    if (p > 0.0) kl += p * std::log(p / qq);
  }
  m.l2 = std::sqrt(l2);
  if (zero_on_occupied || !(p_kept > 0.0))
    m.kl = std::numeric_limits<double>::infinity();
  else
    m.kl = std::fmax(0.0, kl);  // Gibbs: true value is nonnegative; clip roundoff
  m.peak_offset = std::fabs(peak_p - peak_q);
  return m;
}

void MomentAccumulator::add(double x, double weight) {
  n += weight;
  s1 += weight * x;
  const double x2 = x * x;
  s2 += weight * x2;
  s3 += weight * x2 * x;
  s4 += weight * x2 * x2;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  n += other.n;
  s1 += other.s1;
  s2 += other.s2;
  s3 += other.s3;
  s4 += other.s4;
}

double MomentAccumulator::mean() const { return n > 0.0 ? s1 / n : 0.0; }

double MomentAccumulator::variance() const {
  if (!(n > 0.0)) return 0.0;
  const double m = mean();
  return s2 / n - m * m;
}

double MomentAccumulator::excess_kurtosis() const {
  if (!(n > 0.0)) return 0.0;
  const double m = mean();
  const double m2 = s2 / n - m * m;
  const double m4 = s4 / n - 4.0 * m * s3 / n + 6.0 * m * m * s2 / n - 3.0 * m * m * m * m;
  return m4 / (m2 * m2) - 3.0;
}

}  // namespace sedlab

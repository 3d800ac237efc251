#pragma once

// Asymptotic-compactness machinery for pair runs w = u1 - u2:
//   - the damping-gap constant C_delta with
//       |a-b|^2 <= delta + C_delta (h(a)-h(b))(a-b),
//   - the difference energy E_w = 1/2 |w|^2 + 1/2 |grad w|^2,
//   - the contractive functional phi_{delta,T} (six integral components),
//   - C_M and the master bound E_w(T) <= C_M/T + phi/T,
//   - the forcing-difference integral inequality,
//   - omega-limit clouds, Hausdorff semidistance, pullback kernel-section
//     clouds, and the Cauchy-tail compactness diagnostic.
//
// Double-time integrals int_0^T int_s^T q dtau ds are computed with a
// cumulative inner pass (O(n) per outer node).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "attractor/core.hpp"
#include "attractor/dynamics.hpp"
#include "attractor/energy.hpp"
#include "attractor/errors.hpp"
#include "attractor/forcing.hpp"
#include "attractor/process.hpp"
#include "attractor/spectral.hpp"

namespace attractor {

// Smallest grid-feasible C_delta, verified a posteriori on an independent
// random pair sample (doubling on verification failure, at most 10 times).
inline double damping_gap_constant(const DampingSpec& damping, double delta, double s_max,
                                   int grid_points, std::uint64_t seed = 12345,
                                   int verify_pairs = 100000) {
  if (!(delta > 0.0)) throw Error("damping_gap_constant: delta must be > 0");
  Vec grid(grid_points);
  for (int i = 0; i < grid_points; ++i)
    grid[i] = -s_max + 2.0 * s_max * i / (grid_points - 1);
  Vec h_vals(grid_points);
  for (int i = 0; i < grid_points; ++i) h_vals[i] = damping.h(grid[i]);

  double c = 0.0;
  for (int i = 0; i < grid_points; ++i)
    for (int j = 0; j < i; ++j) {
      const double du = grid[i] - grid[j];
      const double prod = (h_vals[i] - h_vals[j]) * du;
      if (prod <= 0.0) continue;
      c = std::max(c, (du * du - delta) / prod);
    }
  c = std::max(c, 0.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-s_max, s_max);
  for (int attempt = 0; attempt <= 10; ++attempt) {
    bool ok = true;
    rng.seed(seed);
    for (int k = 0; k < verify_pairs; ++k) {
      const double a = unif(rng), b = unif(rng);
      const double lhs = (a - b) * (a - b);
      const double rhs = delta + c * (damping.h(a) - damping.h(b)) * (a - b);
      if (lhs > rhs + 1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
    if (attempt == 10)
      throw Error("damping_gap_constant: verification failed after 10 doublings");
    c = (c > 0.0) ? 2.0 * c : 1.0;
  }
  return c;
}

// A pair of trajectories on bit-identical time grids, with their (local-time)
// effective symbols.
struct PairRun {
  Trajectory a;
  Trajectory b;
  Symbol sigma_a;
  Symbol sigma_b;

  void check_aligned() const {
    if (a.times.size() != b.times.size())
      throw Error("PairRun: trajectories have different sample counts");
    for (std::size_t i = 0; i < a.times.size(); ++i)
      if (a.times[i] != b.times[i]) throw Error("PairRun: sample grids are not aligned");
  }
  std::size_t n_samples() const { return a.times.size(); }
};

inline double difference_energy(const PairRun& pair, std::size_t idx, const Basis& basis) {
  if (idx >= pair.n_samples()) throw Error("difference_energy: sample index out of range");
  const Vec w = sub(pair.a.states[idx].u, pair.b.states[idx].u);
  const Norms nw = norms(w, basis);
  return 0.5 * nw.l2 * nw.l2 + 0.5 * nw.h1 * nw.h1;
}

struct PhiResult {
  double total = 0.0;
  // Signed components, in the order they appear in the functional:
  //   [0] -int int (f1-f2) w_t      (double time)
  //   [1] +(1+C_delta) int int (g1-g2) w_t
  //   [2] -C_delta int (f1-f2) w_t
  //   [3] -1/2 int (h1-h2) w
  //   [4] -1/2 int (f1-f2) w
  //   [5] +1/2 int (g1-g2) w
  std::array<double, 6> components{};
};

namespace detail {

// int_0^T int_s^T q(tau) dtau ds from uniform samples of q.
inline double double_time_integral(const Vec& q, double dt) {
  const Vec cum = cumulative_trapezoid(q, dt);
  const double total = cum.back();
  Vec inner(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) inner[i] = total - cum[i];
  return trapezoid(inner, dt);
}

struct PairIntegrands {
  Vec qf_wt, qg_wt, qh_w, qf_w, qg_w;
  double dt = 0.0;
};

inline PairIntegrands pair_integrands(const PairRun& pair, const NonlinearitySpec& nonlin,
                                      const DampingSpec& damping, const Basis& basis) {
  pair.check_aligned();
  const std::size_t n = pair.n_samples();
  PairIntegrands out;
  out.dt = pair.a.times[1] - pair.a.times[0];
  for (std::size_t i = 0; i < n; ++i) {
    const State& ya = pair.a.states[i];
    const State& yb = pair.b.states[i];
    const Vec w = sub(ya.u, yb.u);
    const Vec wt = sub(ya.v, yb.v);
    const Vec ua = to_physical(ya.u, basis);
    const Vec ub = to_physical(yb.u, basis);
    const Vec va = to_physical(ya.v, basis);
    const Vec vb = to_physical(yb.v, basis);
    const Vec w_phys = to_physical(w, basis);
    const Vec wt_phys = to_physical(wt, basis);
    const Vec fdiff = sub(apply_pointwise(nonlin.f, ua), apply_pointwise(nonlin.f, ub));
    const Vec hdiff = sub(apply_pointwise(damping.h, va), apply_pointwise(damping.h, vb));
    const double t_local = pair.a.times[i] - pair.a.times[0];
    const Vec gdiff = sub(pair.sigma_a.evaluate(t_local, basis.n_modes),
                          pair.sigma_b.evaluate(t_local, basis.n_modes));
    out.qf_wt.push_back(inner_nodal(fdiff, wt_phys, basis));
    out.qg_wt.push_back(dot(gdiff, wt));
    out.qh_w.push_back(inner_nodal(hdiff, w_phys, basis));
    out.qf_w.push_back(inner_nodal(fdiff, w_phys, basis));
    out.qg_w.push_back(dot(gdiff, w));
  }
  return out;
}

}  // namespace detail

inline PhiResult phi(const PairRun& pair, double c_delta, double T,
                     const NonlinearitySpec& nonlin, const DampingSpec& damping,
                     const Basis& basis) {
  pair.check_aligned();
  const std::size_t n = pair.n_samples();
  if (n < 2) throw Error("phi: need at least 2 samples");
  const double dt = pair.a.times[1] - pair.a.times[0];
  if (dt > T / 200.0 + 1e-12)
    throw Error("phi: sampling too sparse (record spacing must be <= T/200)");

  const detail::PairIntegrands q = detail::pair_integrands(pair, nonlin, damping, basis);
  PhiResult r;
  r.components[0] = -detail::double_time_integral(q.qf_wt, dt);
  r.components[1] = (1.0 + c_delta) * detail::double_time_integral(q.qg_wt, dt);
  r.components[2] = -c_delta * trapezoid(q.qf_wt, dt);
  r.components[3] = -0.5 * trapezoid(q.qh_w, dt);
  r.components[4] = -0.5 * trapezoid(q.qf_w, dt);
  r.components[5] = 0.5 * trapezoid(q.qg_w, dt);
  for (double c : r.components) r.total += c;
  return r;
}

inline double c_m(const PairRun& pair, double delta, double T, double c_delta,
                  const Basis& basis) {
  pair.check_aligned();
  const std::size_t last = pair.n_samples() - 1;
  const Vec w0 = sub(pair.a.states[0].u, pair.b.states[0].u);
  const Vec wt0 = sub(pair.a.states[0].v, pair.b.states[0].v);
  const Vec wT = sub(pair.a.states[last].u, pair.b.states[last].u);
  const Vec wtT = sub(pair.a.states[last].v, pair.b.states[last].v);
  const double ew0 = difference_energy(pair, 0, basis);
  return delta * T * basis.domain_measure() + c_delta * ew0 - 0.5 * dot(wtT, wT) +
         0.5 * dot(wt0, w0);
}

struct CompactnessReport {
  double delta = 0.0;
  double T = 0.0;
  double c_delta = 0.0;
  double e_w_T = 0.0;
  double phi_total = 0.0;
  std::array<double, 6> phi_components{};
  double c_m_value = 0.0;
  double slack = 0.0;   // c_m/T + phi/T - E_w(T)
};

inline CompactnessReport verify_master_bound(const PairRun& pair, double delta, double T,
                                             double c_delta, const NonlinearitySpec& nonlin,
                                             const DampingSpec& damping, const Basis& basis) {
  CompactnessReport rep;
  rep.delta = delta;
  rep.T = T;
  rep.c_delta = c_delta;
  // Truncate the pair to [0, T].
  PairRun cut;
  cut.sigma_a = pair.sigma_a;
  cut.sigma_b = pair.sigma_b;
  const double t0 = pair.a.times[0];
  for (std::size_t i = 0; i < pair.n_samples(); ++i) {
    if (pair.a.times[i] - t0 > T + 1e-9) break;
    cut.a.times.push_back(pair.a.times[i]);
    cut.a.states.push_back(pair.a.states[i]);
    cut.b.times.push_back(pair.b.times[i]);
    cut.b.states.push_back(pair.b.states[i]);
  }
  if (std::abs(cut.a.times.back() - t0 - T) > 1e-9)
    throw Error("verify_master_bound: recorded horizon does not cover T");
  rep.e_w_T = difference_energy(cut, cut.n_samples() - 1, basis);
  const PhiResult p = phi(cut, c_delta, T, nonlin, damping, basis);
  rep.phi_total = p.total;
  rep.phi_components = p.components;
  rep.c_m_value = c_m(cut, delta, T, c_delta, basis);
  rep.slack = rep.c_m_value / T + rep.phi_total / T - rep.e_w_T;
  return rep;
}

struct ForcingDifferenceReport {
  double lhs = 0.0;      // |int_0^T int_s^T <g1-g2, w_t>|
  double term_boundary = 0.0;   // 2 T M |w(T)|
  double term_l2 = 0.0;         // 2 M sqrt(T) (int |w|^2)^{1/2}
  double term_gt = 0.0;         // T int int |(g1_t - g2_t) w|
  double m_bound = 0.0;
  double slack = 0.0;
};

inline ForcingDifferenceReport forcing_difference_check(const PairRun& pair, double T,
                                                        const Basis& basis,
                                                        double scan_dt = 1e-2) {
  pair.check_aligned();
  const std::size_t n = pair.n_samples();
  const double dt = pair.a.times[1] - pair.a.times[0];
  ForcingDifferenceReport rep;
  rep.m_bound = std::max(linf_norm(pair.sigma_a, 0.0, T, scan_dt),
                         linf_norm(pair.sigma_b, 0.0, T, scan_dt));

  Vec qg_wt(n), w_l2sq(n), gt_abs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec w = sub(pair.a.states[i].u, pair.b.states[i].u);
    const Vec wt = sub(pair.a.states[i].v, pair.b.states[i].v);
    const double t_local = pair.a.times[i] - pair.a.times[0];
    const Vec gdiff = sub(pair.sigma_a.evaluate(t_local, basis.n_modes),
                          pair.sigma_b.evaluate(t_local, basis.n_modes));
    const Vec gtdiff = sub(pair.sigma_a.evaluate_dt(t_local, basis.n_modes),
                           pair.sigma_b.evaluate_dt(t_local, basis.n_modes));
    qg_wt[i] = dot(gdiff, wt);
    w_l2sq[i] = dot(w, w);
    const Vec w_phys = to_physical(w, basis);
    const Vec gt_phys = to_physical(gtdiff, basis);
    double s = 0.0;
    for (int q = 0; q < basis.n_quad; ++q)
      s += basis.quad_weights[q] * std::abs(gt_phys[q] * w_phys[q]);
    gt_abs[i] = s;
  }
  rep.lhs = std::abs(detail::double_time_integral(qg_wt, dt));
  rep.term_boundary = 2.0 * T * rep.m_bound * std::sqrt(w_l2sq.back());
  rep.term_l2 = 2.0 * rep.m_bound * std::sqrt(T) * std::sqrt(trapezoid(w_l2sq, dt));
  rep.term_gt = T * trapezoid(gt_abs, dt);
  rep.slack = rep.term_boundary + rep.term_l2 + rep.term_gt - rep.lhs;
  return rep;
}

struct DampingPowerReport {
  double power_integral = 0.0;    // int_0^T <h(u_t), u_t>
  double growth_integral = 0.0;   // int_0^T int |h(u_t)|^{(p+1)/p}
  double bound = 0.0;             // C (T mes(Omega) + power_integral)
  double slack = 0.0;
};

inline DampingPowerReport damping_power_integral(const Trajectory& traj,
                                                 const DampingSpec& damping,
                                                 const Basis& basis, double c510) {
  DampingPowerReport rep;
  const std::size_t n = traj.states.size();
  if (n < 2) throw Error("damping_power_integral: need a recorded trajectory");
  const double dt = traj.times[1] - traj.times[0];
  const double expo = (damping.growth_exponent + 1.0) / damping.growth_exponent;
  Vec power(n), growth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec v_phys = to_physical(traj.states[i].v, basis);
    const Vec hv = apply_pointwise(damping.h, v_phys);
    power[i] = inner_nodal(hv, v_phys, basis);
    double s = 0.0;
    for (int q = 0; q < basis.n_quad; ++q)
      s += basis.quad_weights[q] * std::pow(std::abs(hv[q]), expo);
    growth[i] = s;
  }
  const double T = traj.times.back() - traj.times.front();
  rep.power_integral = trapezoid(power, dt);
  rep.growth_integral = trapezoid(growth, dt);
  rep.bound = c510 * (T * basis.domain_measure() + rep.power_integral);
  rep.slack = rep.bound - rep.growth_integral;
  return rep;
}

// ---- clouds ---------------------------------------------------------------

struct Cloud {
  std::vector<State> points;
  std::string provenance;
};

inline void cloud_insert(Cloud& cloud, const State& y, const Basis& basis,
                         double resolution = 1e-9) {
  for (const State& p : cloud.points)
    if (x_distance(p, y, basis) <= resolution) return;
  cloud.points.push_back(y);
}

inline double hausdorff_semidist(const Cloud& a, const Cloud& b, const Basis& basis) {
  if (a.points.empty() || b.points.empty())
    throw Error("hausdorff_semidist: empty cloud");
  double worst = 0.0;
  for (const State& p : a.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const State& q : b.points) best = std::min(best, x_distance(p, q, basis));
    worst = std::max(worst, best);
  }
  return worst;
}

// Finite surrogate of the omega-limit set: states U_sigma(t, tau) x for all
// (x, sigma, t) with t in the tail half of sample_times.
inline Cloud omega_limit_cloud(const std::vector<State>& b_samples, const HullSample& hull,
                               double tau, const Vec& sample_times,
                               const DampingSpec& damping, const NonlinearitySpec& nonlin,
                               const Basis& basis, const SolverConfig& cfg, int workers = 1) {
  for (std::size_t i = 0; i + 1 < sample_times.size(); ++i)
    if (!(sample_times[i] < sample_times[i + 1]))
      throw Error("omega_limit_cloud: sample_times must be increasing");
  if (!sample_times.empty() && sample_times.front() < tau)
    throw Error("omega_limit_cloud: sample_times must be >= tau");
  const std::size_t tail_begin = sample_times.size() / 2;

  const int n_runs = static_cast<int>(b_samples.size() * hull.members.size());
  std::vector<std::vector<State>> per_run(n_runs);
  parallel_for(n_runs, workers, [&](int idx) {
    const int si = idx / static_cast<int>(hull.members.size());
    const int gj = idx % static_cast<int>(hull.members.size());
    State y = b_samples[si];
    double t_prev = tau;
    for (std::size_t k = 0; k < sample_times.size(); ++k) {
      y = evolve_final(hull.members[gj], t_prev, sample_times[k], y, damping, nonlin, basis,
                       cfg);
      t_prev = sample_times[k];
      if (k >= tail_begin) per_run[idx].push_back(y);
    }
  });

  Cloud cloud;
  cloud.provenance = "omega_limit";
  for (const auto& states : per_run)
    for (const State& y : states) cloud_insert(cloud, y, basis);
  return cloud;
}

// Pullback clouds {U_sigma(s, s-T) x : x in B0} per horizon T, plus the
// semidistance between successive horizons as a Cauchy-in-T diagnostic.
struct PullbackResult {
  Vec horizons;
  std::vector<Cloud> clouds;
  Vec successive_semidist;   // dist(cloud_{k+1}, cloud_k)
};

inline PullbackResult kernel_section_pullback(const Symbol& sigma, double s_phase,
                                              const Vec& horizons,
                                              const std::vector<State>& b0_samples,
                                              const DampingSpec& damping,
                                              const NonlinearitySpec& nonlin,
                                              const Basis& basis, const SolverConfig& cfg,
                                              int workers = 1) {
  for (std::size_t i = 0; i + 1 < horizons.size(); ++i)
    if (!(horizons[i] < horizons[i + 1]))
      throw Error("kernel_section_pullback: horizons must be increasing");
  PullbackResult out;
  out.horizons = horizons;
  for (double T : horizons) {
    std::vector<State> finals(b0_samples.size());
    parallel_for(static_cast<int>(b0_samples.size()), workers, [&](int i) {
      finals[i] = (T == 0.0) ? b0_samples[i]
                             : evolve_final(sigma, s_phase - T, s_phase, b0_samples[i],
                                            damping, nonlin, basis, cfg);
    });
    Cloud cloud;
    cloud.provenance = "pullback T=" + std::to_string(T);
    for (const State& y : finals) cloud_insert(cloud, y, basis);
    out.clouds.push_back(std::move(cloud));
  }
  for (std::size_t k = 0; k + 1 < out.clouds.size(); ++k)
    out.successive_semidist.push_back(
        hausdorff_semidist(out.clouds[k + 1], out.clouds[k], basis));
  return out;
}

// Max pairwise X-distance within the last half of an ordered state list.
inline double cauchy_tail_test(const std::vector<State>& states, const Basis& basis) {
  if (states.size() < 4) throw Error("cauchy_tail_test: need at least 4 states");
  const std::size_t begin = states.size() / 2;
  double diam = 0.0;
  for (std::size_t i = begin; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j)
      diam = std::max(diam, x_distance(states[i], states[j], basis));
  return diam;
}

}  // namespace attractor

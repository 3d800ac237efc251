#pragma once

// Energy machinery: E_0 and E_eps, the dissipation-inequality monitor
//   E_eps' <= -gamma eps E_eps + (N eps sqrt(E_eps) - 1/2) w(t) + C,
// the lower-bound check
//   (C0/2)(|u|^2 + |u_t|^2) - C1 <= E_0(t),
// and the uniform absorbing-set estimator: an ensemble of trajectories over a
// hull sample, a fitted radius rho, entry times, and the M of
//   E_0(t) <= M (1 + sqrt(E_0(0))).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "attractor/core.hpp"
#include "attractor/dynamics.hpp"
#include "attractor/errors.hpp"
#include "attractor/forcing.hpp"
#include "attractor/process.hpp"
#include "attractor/spectral.hpp"

namespace attractor {

// Deterministic fan-out over [0, count); results land in caller-owned slots.
inline void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct DissipationReport {
  // sigma = 0 diagnostics
  double max_e0_increase = 0.0;          // max over steps of E0(t_{k+1}) - E0(t_k)
  double max_balance_residual = 0.0;     // |dE0/dt + <h(v),v>| per step (sigma=0)
  // (5.6) fit
  double fitted_c = 0.0;                 // 99th percentile of the per-step requirement
  int violations = 0;                    // steps exceeding fitted_c
  int steps = 0;
};

// Requires a trajectory recorded with per-step energy samples.
inline DissipationReport dissipation_monitor(const Trajectory& traj, double gamma,
                                             double n_const, double eps, bool sigma_is_zero) {
  if (traj.energy.size() < 2) throw Error("dissipation_monitor: missing energy records");
  DissipationReport rep;
  rep.steps = static_cast<int>(traj.energy.size()) - 1;
  Vec required;
  for (std::size_t k = 0; k + 1 < traj.energy.size(); ++k) {
    const EnergySample& a = traj.energy[k];
    const EnergySample& b = traj.energy[k + 1];
    const double dt = b.time - a.time;
    const double de0 = b.e0 - a.e0;
    rep.max_e0_increase = std::max(rep.max_e0_increase, de0);
    if (sigma_is_zero) {
      // d/dt E0 = -<h(u_t),u_t> = 1 - w(t); midpoint value of w.
      const double wmid = 0.5 * (a.damping_power_w + b.damping_power_w);
      rep.max_balance_residual =
          std::max(rep.max_balance_residual, std::abs(de0 / dt + (wmid - 1.0)));
    }
    const double e_mid = 0.5 * (a.e_eps + b.e_eps);
    const double w_mid = 0.5 * (a.damping_power_w + b.damping_power_w);
    const double sq = std::sqrt(std::max(0.0, e_mid));
    // C needed so that dE_eps/dt <= -gamma eps E + (N eps sqrt(E) - 1/2) w + C.
    required.push_back((b.e_eps - a.e_eps) / dt + gamma * eps * e_mid -
                       (n_const * eps * sq - 0.5) * w_mid);
  }
  Vec sorted = required;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx =
      std::min(sorted.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * sorted.size())));
  rep.fitted_c = std::max(0.0, sorted[idx]);
  for (double r : required)
    if (r > rep.fitted_c + 1e-12) ++rep.violations;
  return rep;
}

// Lower bound (5.5) along a recorded trajectory with audit-fitted constants:
// returns the minimal slack of E0 - (c0/2)(|u|^2 + |v|^2) + c1.
inline double energy_lower_bound_slack(const Trajectory& traj, const NonlinearitySpec& nonlin,
                                       const Basis& basis, double c0, double c1) {
  double slack = std::numeric_limits<double>::infinity();
  for (const State& y : traj.states) {
    const Norms nu = norms(y.u, basis);
    const Norms nv = norms(y.v, basis);
    const double e0 = energy0(y, nonlin, basis);
    slack = std::min(slack,
                     e0 - 0.5 * c0 * (nu.l2 * nu.l2 + nv.l2 * nv.l2) + c1);
  }
  return slack;
}

struct AbsorbEntry {
  int state_index = 0;
  int symbol_index = 0;
  double entry_time = 0.0;
  double post_entry_sup = 0.0;     // sup of x_norm after entry
  double post_window_sup = 0.0;    // sup over the post-transient window
  double e0_initial = 0.0;
  double m_ratio = 0.0;            // max post-entry E0(t) / (1 + sqrt(E0(0)))
};

struct AbsorbReport {
  double rho = 0.0;                // 1.1 * max post-transient sup
  double m_fit = 0.0;              // constant of the E0 bound
  double hull_rho_ratio = 1.0;     // max/min of per-symbol rho
  double hull_entry_spread = 1.0;  // (1+max)/(1+min) of per-symbol max entry time
  bool all_entered = true;
  bool uniform = true;
  double horizon = 0.0;
  std::vector<AbsorbEntry> entries;
};

// Samples `count` initial states with x_norm <= radius, modal amplitudes
// decaying like 1/k to keep the data in the energy space.
inline std::vector<State> sample_ball(const Basis& basis, double radius, int count,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<State> out;
  for (int i = 0; i < count; ++i) {
    State y = zero_state(basis);
    for (int k = 0; k < basis.n_modes; ++k) {
      const double decay = 1.0 / (1.0 + k);
      y.u[k] = decay * normal(rng);
      y.v[k] = decay * normal(rng);
    }
    const double xn = y.x_norm(basis);
    const double target = radius * unif(rng);
    if (xn > 0.0) {
      const double sc = target / xn;
      for (int k = 0; k < basis.n_modes; ++k) {
        y.u[k] *= sc;
        y.v[k] *= sc;
      }
    }
    out.push_back(std::move(y));
  }
  return out;
}

inline AbsorbReport absorbing_estimate(const std::vector<State>& initial_states,
                                       const HullSample& hull, double horizon,
                                       const DampingSpec& damping,
                                       const NonlinearitySpec& nonlin, const Basis& basis,
                                       const SolverConfig& cfg, double uniformity_factor = 1.5,
                                       int workers = 1) {
  const int n_states = static_cast<int>(initial_states.size());
  const int n_sym = static_cast<int>(hull.members.size());
  const int n_runs = n_states * n_sym;
  if (n_runs == 0) throw Error("absorbing_estimate: empty ensemble");

  struct RunData {
    Vec times;
    Vec xnorms;
    Vec e0s;
  };
  std::vector<RunData> runs(n_runs);
  parallel_for(n_runs, workers, [&](int idx) {
    const int si = idx / n_sym;
    const int gj = idx % n_sym;
    const Trajectory traj = evolve(hull.members[gj], 0.0, horizon, initial_states[si],
                                   damping, nonlin, basis, cfg);
    RunData& rd = runs[idx];
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      rd.times.push_back(traj.times[k]);
      rd.xnorms.push_back(traj.states[k].x_norm(basis));
      rd.e0s.push_back(energy0(traj.states[k], nonlin, basis));
    }
  });

  AbsorbReport rep;
  rep.horizon = horizon;
  const double window_start = 0.5 * horizon;

  // Pass 1: post-transient sup per run -> rho.
  Vec window_sup(n_runs, 0.0);
  for (int idx = 0; idx < n_runs; ++idx) {
    for (std::size_t k = 0; k < runs[idx].times.size(); ++k)
      if (runs[idx].times[k] >= window_start)
        window_sup[idx] = std::max(window_sup[idx], runs[idx].xnorms[k]);
  }
  rep.rho = 1.1 * *std::max_element(window_sup.begin(), window_sup.end());

  // Pass 2: entry time = first sample from which the suffix stays inside rho.
  Vec sym_rho(n_sym, 0.0), sym_entry(n_sym, 0.0);
  for (int idx = 0; idx < n_runs; ++idx) {
    const RunData& rd = runs[idx];
    const int nk = static_cast<int>(rd.times.size());
    Vec suffix_max(nk);
    double m = 0.0;
    for (int k = nk - 1; k >= 0; --k) {
      m = std::max(m, rd.xnorms[k]);
      suffix_max[k] = m;
    }
    int entry = -1;
    for (int k = 0; k < nk; ++k)
      if (suffix_max[k] <= rep.rho) {
        entry = k;
        break;
      }
    AbsorbEntry e;
    e.state_index = idx / n_sym;
    e.symbol_index = idx % n_sym;
    e.e0_initial = rd.e0s.front();
    if (entry < 0) {
      rep.all_entered = false;
      e.entry_time = std::numeric_limits<double>::infinity();
    } else {
      e.entry_time = rd.times[entry];
      const double denom = 1.0 + std::sqrt(std::max(0.0, rd.e0s.front()));
      for (int k = entry; k < nk; ++k) {
        e.post_entry_sup = std::max(e.post_entry_sup, rd.xnorms[k]);
        e.m_ratio = std::max(e.m_ratio, rd.e0s[k] / denom);
      }
    }
    e.post_window_sup = window_sup[idx];
    rep.m_fit = std::max(rep.m_fit, e.m_ratio);
    sym_rho[e.symbol_index] = std::max(sym_rho[e.symbol_index], 1.1 * window_sup[idx]);
    sym_entry[e.symbol_index] = std::max(sym_entry[e.symbol_index], e.entry_time);
    rep.entries.push_back(e);
  }

  const auto [rmin, rmax] = std::minmax_element(sym_rho.begin(), sym_rho.end());
  rep.hull_rho_ratio = (*rmin > 0.0) ? *rmax / *rmin : 1.0;
  const auto [emin, emax] = std::minmax_element(sym_entry.begin(), sym_entry.end());
  rep.hull_entry_spread = (1.0 + *emax) / (1.0 + *emin);
  rep.uniform = rep.hull_rho_ratio <= uniformity_factor;
  return rep;
}

}  // namespace attractor

#pragma once

// The process U_sigma(t,tau): Galerkin reduction of
//   u_tt + h(u_t) - Laplace(u) + f(u) = g(x,t)
// in modal coordinates,
//   du_k = v_k,  dv_k = -lambda_k u_k - P_k[h(v)] - P_k[f(u)] + sigma_k(t),
// with an explicit RK4 scheme and an IMEX midpoint scheme (stiff terms
// -lambda u and h(v) implicit via damped Newton; f and sigma explicit).
//
// evolve() folds tau into the symbol shift once and then integrates on the
// local grid k*dt. This makes the process axioms and the translation identity
// exact (bitwise) properties on aligned grids: both sides of
// U_sigma(t+s,tau+s) = U_{T(s)sigma}(t,tau) run the identical float program.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "attractor/core.hpp"
#include "attractor/dynamics.hpp"
#include "attractor/errors.hpp"
#include "attractor/forcing.hpp"
#include "attractor/spectral.hpp"

namespace attractor {

struct State {
  Vec u;
  Vec v;
  double time = 0.0;

  double x_norm(const Basis& b) const {
    const double h1 = norms(u, b).h1;
    const double l2 = norms(v, b).l2;
    return std::sqrt(h1 * h1 + l2 * l2);
  }
};

inline State zero_state(const Basis& b) {
  return {Vec(b.n_modes, 0.0), Vec(b.n_modes, 0.0), 0.0};
}

inline double x_distance(const State& a, const State& c, const Basis& b) {
  const double h1 = norms(sub(a.u, c.u), b).h1;
  const double l2 = norms(sub(a.v, c.v), b).l2;
  return std::sqrt(h1 * h1 + l2 * l2);
}

enum class Scheme { rk4_explicit, imex_midpoint };

struct SolverConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::rk4_explicit;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  int record_stride = 1;
  bool record_energy = false;
  double energy_eps = 0.0;   // the epsilon of E_eps records
};

struct EnergySample {
  double time = 0.0;
  double e0 = 0.0;
  double e_eps = 0.0;
  double damping_power_w = 1.0;   // w(t) = 1 + <h(u_t), u_t>
  double forcing_power = 0.0;     // <g, u_t>
};

struct Trajectory {
  std::vector<double> times;      // absolute times of the recorded states
  std::vector<State> states;
  std::vector<EnergySample> energy;   // per integration step when requested
  double dt = 0.0;
  int record_stride = 1;
  std::string provenance;
};

constexpr double kBlowupThreshold = 1e12;

struct Rhs {
  Vec du;
  Vec dv;
};

// sigma is evaluated at the raw time argument handed in; callers that fold
// tau into the symbol pass local times.
inline Rhs rhs(const State& y, double t, const Symbol& sigma,
               const DampingSpec& damping, const NonlinearitySpec& nonlin,
               const Basis& basis) {
  const Vec v_phys = to_physical(y.v, basis);
  const Vec u_phys = to_physical(y.u, basis);
  const Vec hv = apply_pointwise(damping.h, v_phys);
  const Vec fu = apply_pointwise(nonlin.f, u_phys);
  const Vec hv_modal = to_modal(hv, basis);
  const Vec fu_modal = to_modal(fu, basis);
  const Vec g = sigma.evaluate(t, basis.n_modes);
  Rhs out;
  out.du = y.v;
  out.dv.resize(basis.n_modes);
  for (int k = 0; k < basis.n_modes; ++k)
    out.dv[k] = -basis.eigenvalues[k] * y.u[k] - hv_modal[k] - fu_modal[k] + g[k];
  return out;
}

namespace detail {

// In-place LU solve with partial pivoting; a is n x n row-major.
inline void lu_solve(Vec& a, Vec& x, int n) {
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[best * n + col])) best = r;
    if (best != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[best * n + c]);
      std::swap(x[col], x[best]);
    }
    const double d = a[col * n + col];
    if (d == 0.0) throw Error("singular Newton Jacobian");
    for (int r = col + 1; r < n; ++r) {
      const double m = a[r * n + col] / d;
      if (m == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= m * a[col * n + c];
      x[r] -= m * x[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = x[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
}

inline void check_blowup(const State& y, const Basis& basis, double t) {
  if (!all_finite(y.u) || !all_finite(y.v))
    throw BlowupError(t, std::numeric_limits<double>::infinity());
  const double xn = y.x_norm(basis);
  if (xn > kBlowupThreshold) throw BlowupError(t, xn);
}

inline State step_rk4(const State& y, double t, const Symbol& sigma,
                      const DampingSpec& damping, const NonlinearitySpec& nonlin,
                      const Basis& basis, double dt) {
  const Rhs k1 = rhs(y, t, sigma, damping, nonlin, basis);
  State y2 = y;
  axpy(0.5 * dt, k1.du, y2.u);
  axpy(0.5 * dt, k1.dv, y2.v);
  const double t_half = t + dt * 0.5;
  const Rhs k2 = rhs(y2, t_half, sigma, damping, nonlin, basis);
  State y3 = y;
  axpy(0.5 * dt, k2.du, y3.u);
  axpy(0.5 * dt, k2.dv, y3.v);
  const Rhs k3 = rhs(y3, t_half, sigma, damping, nonlin, basis);
  State y4 = y;
  axpy(dt, k3.du, y4.u);
  axpy(dt, k3.dv, y4.v);
  const double t_full = t + dt;
  const Rhs k4 = rhs(y4, t_full, sigma, damping, nonlin, basis);

  State out = y;
  const double c = dt / 6.0;
  for (int k = 0; k < basis.n_modes; ++k) {
    out.u[k] += c * (k1.du[k] + 2.0 * k2.du[k] + 2.0 * k3.du[k] + k4.du[k]);
    out.v[k] += c * (k1.dv[k] + 2.0 * k2.dv[k] + 2.0 * k3.dv[k] + k4.dv[k]);
  }
  return out;
}

// Midpoint IMEX step. With z = v_{n+1}:
//   u_half(z) = u_n + (dt/4)(v_n + z),  v_half(z) = (v_n + z)/2,
//   R(z) = z - v_n + dt [ lambda u_half + P h(v_half) + P f(u_n) - g(t+dt/2) ].
// Damped Newton with the exact dense Jacobian
//   J = I + (dt^2/4) Lambda + (dt/2) P diag(h'(v_half)) E.
inline State step_imex(const State& y, double t, const Symbol& sigma,
                       const DampingSpec& damping, const NonlinearitySpec& nonlin,
                       const Basis& basis, const SolverConfig& cfg) {
  const int n = basis.n_modes;
  const double dt = cfg.dt;
  const Vec fu_modal = to_modal(apply_pointwise(nonlin.f, to_physical(y.u, basis)), basis);
  const Vec g = sigma.evaluate(t + dt * 0.5, n);

  Vec explicit_part(n);
  for (int k = 0; k < n; ++k) explicit_part[k] = fu_modal[k] - g[k];

  auto residual = [&](const Vec& z) {
    Vec u_half = y.u;
    Vec v_half(n);
    for (int k = 0; k < n; ++k) {
      u_half[k] += 0.25 * dt * (y.v[k] + z[k]);
      v_half[k] = 0.5 * (y.v[k] + z[k]);
    }
    const Vec hv_modal =
        to_modal(apply_pointwise(damping.h, to_physical(v_half, basis)), basis);
    Vec r(n);
    for (int k = 0; k < n; ++k)
      r[k] = z[k] - y.v[k] +
             dt * (basis.eigenvalues[k] * u_half[k] + hv_modal[k] + explicit_part[k]);
    return r;
  };

  Vec z = y.v;   // initial guess: previous velocity
  Vec r = residual(z);
  double rn = max_abs(r);
  int iter = 0;
  while (rn >= cfg.newton_tol) {
    if (iter++ >= cfg.newton_max_iter) throw NewtonError(rn, iter - 1);
    // Jacobian at the current iterate.
    Vec v_half(n);
    for (int k = 0; k < n; ++k) v_half[k] = 0.5 * (y.v[k] + z[k]);
    const Vec hp = apply_pointwise(damping.h_prime, to_physical(v_half, basis));
    Vec jac(static_cast<std::size_t>(n) * n, 0.0);
    for (int row = 0; row < n; ++row) {
      const double* phi_r = basis.mode_values(row);
      for (int col = 0; col < n; ++col) {
        const double* phi_c = basis.mode_values(col);
        double s = 0.0;
        for (int q = 0; q < basis.n_quad; ++q)
          s += basis.quad_weights[q] * phi_r[q] * hp[q] * phi_c[q];
        jac[row * n + col] = 0.5 * dt * s;
      }
      jac[row * n + row] += 1.0 + 0.25 * dt * dt * basis.eigenvalues[row];
    }
    Vec delta = r;
    lu_solve(jac, delta, n);
    // Backtracking line search on the residual norm.
    double alpha = 1.0;
    Vec z_new(n);
    double rn_new = rn;
    Vec r_new;
    for (int bt = 0; bt < 10; ++bt) {
      for (int k = 0; k < n; ++k) z_new[k] = z[k] - alpha * delta[k];
      r_new = residual(z_new);
      rn_new = max_abs(r_new);
      if (rn_new < rn) break;
      alpha *= 0.5;
    }
    if (!(rn_new < rn)) throw NewtonError(rn, iter);
    z = z_new;
    r = r_new;
    rn = rn_new;
  }

  State out = y;
  for (int k = 0; k < n; ++k) {
    out.u[k] = y.u[k] + 0.5 * dt * (y.v[k] + z[k]);
    out.v[k] = z[k];
  }
  return out;
}

}  // namespace detail

inline State step(const State& y, double t, const Symbol& sigma,
                  const DampingSpec& damping, const NonlinearitySpec& nonlin,
                  const Basis& basis, const SolverConfig& cfg) {
  State out = (cfg.scheme == Scheme::rk4_explicit)
                  ? detail::step_rk4(y, t, sigma, damping, nonlin, basis, cfg.dt)
                  : detail::step_imex(y, t, sigma, damping, nonlin, basis, cfg);
  detail::check_blowup(out, basis, t + cfg.dt);
  return out;
}

inline long long aligned_steps(double tau, double t, double dt) {
  const double ratio = (t - tau) / dt;
  const long long n = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9)
    throw Error("evolve: horizon (t - tau) is not aligned to the dt grid");
  if (n < 0) throw Error("evolve: t must be >= tau");
  return n;
}

// Energy bookkeeping shared with the energy module (kept here so evolve can
// record per-step samples without a circular include).
inline double energy0(const State& y, const NonlinearitySpec& nonlin, const Basis& basis) {
  const Norms nu = norms(y.u, basis);
  const Norms nv = norms(y.v, basis);
  const Vec Fu = apply_pointwise(nonlin.F, to_physical(y.u, basis));
  return 0.5 * nu.h1 * nu.h1 + 0.5 * nv.l2 * nv.l2 + integrate_nodal(Fu, basis);
}

inline double energy_eps(const State& y, double eps, const NonlinearitySpec& nonlin,
                         const Basis& basis) {
  if (eps < 0.0) throw Error("energy_eps: eps must be >= 0");
  return energy0(y, nonlin, basis) + eps * dot(y.v, y.u);
}

inline EnergySample make_energy_sample(const State& y, double t_abs, const Symbol& sigma_local,
                                       double t_local, const DampingSpec& damping,
                                       const NonlinearitySpec& nonlin, const Basis& basis,
                                       double eps) {
  EnergySample s;
  s.time = t_abs;
  s.e0 = energy0(y, nonlin, basis);
  s.e_eps = s.e0 + eps * dot(y.v, y.u);
  const Vec v_phys = to_physical(y.v, basis);
  const Vec hv = apply_pointwise(damping.h, v_phys);
  s.damping_power_w = 1.0 + inner_nodal(hv, v_phys, basis);
  s.forcing_power = dot(sigma_local.evaluate(t_local, basis.n_modes), y.v);
  return s;
}

inline Trajectory evolve(const Symbol& sigma, double tau, double t, const State& y_tau,
                         const DampingSpec& damping, const NonlinearitySpec& nonlin,
                         const Basis& basis, const SolverConfig& cfg) {
  const long long n = aligned_steps(tau, t, cfg.dt);
  const Symbol sigma_local = sigma.translated(tau);

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.record_stride = cfg.record_stride;
  State y = y_tau;
  y.time = tau;
  traj.times.push_back(tau);
  traj.states.push_back(y);
  if (cfg.record_energy)
    traj.energy.push_back(
        make_energy_sample(y, tau, sigma_local, 0.0, damping, nonlin, basis, cfg.energy_eps));

  for (long long k = 0; k < n; ++k) {
    const double t_local = static_cast<double>(k) * cfg.dt;
    y = step(y, t_local, sigma_local, damping, nonlin, basis, cfg);
    const double t_local_next = static_cast<double>(k + 1) * cfg.dt;
    y.time = tau + t_local_next;
    if (cfg.record_energy)
      traj.energy.push_back(make_energy_sample(y, y.time, sigma_local, t_local_next, damping,
                                               nonlin, basis, cfg.energy_eps));
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == n) {
      traj.times.push_back(y.time);
      traj.states.push_back(y);
    }
  }
  return traj;
}

inline State evolve_final(const Symbol& sigma, double tau, double t, const State& y_tau,
                          const DampingSpec& damping, const NonlinearitySpec& nonlin,
                          const Basis& basis, SolverConfig cfg) {
  cfg.record_energy = false;
  cfg.record_stride = std::numeric_limits<int>::max();
  return evolve(sigma, tau, t, y_tau, damping, nonlin, basis, cfg).states.back();
}

// One skew-product step S(t)(y, sigma) = (U_sigma(t,0) y, T(t) sigma).
inline std::pair<State, Symbol> skew_step(const State& y, const Symbol& sigma, double t,
                                          const DampingSpec& damping,
                                          const NonlinearitySpec& nonlin, const Basis& basis,
                                          const SolverConfig& cfg) {
  if (t < 0.0) throw Error("skew_step: t must be >= 0");
  return {evolve_final(sigma, 0.0, t, y, damping, nonlin, basis, cfg), sigma.translated(t)};
}

}  // namespace attractor

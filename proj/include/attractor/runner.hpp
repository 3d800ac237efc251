#pragma once

// Config-driven experiment runner behind the CLI. Every experiment writes CSV
// artifacts (plus a human-readable summary) into the output directory and a
// manifest naming each artifact with its content hash.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "attractor/compactness.hpp"
#include "attractor/config.hpp"
#include "attractor/core.hpp"
#include "attractor/dynamics.hpp"
#include "attractor/energy.hpp"
#include "attractor/forcing.hpp"
#include "attractor/process.hpp"
#include "attractor/report.hpp"
#include "attractor/spectral.hpp"

namespace attractor {

struct RunContext {
  ExperimentConfig cfg;
  Basis basis;
  DampingSpec damping;
  NonlinearitySpec nonlin;
  Symbol symbol;
  SolverConfig solver;
  std::string config_hash;
};

inline RunContext make_context(const ExperimentConfig& cfg) {
  RunContext ctx{cfg,
                 make_basis(cfg.basis),
                 make_damping(cfg.damping),
                 make_nonlinearity(cfg.nonlinearity),
                 Symbol::zero(),
                 make_solver(cfg.solver),
                 ""};
  ctx.symbol = make_symbol(cfg.forcing, ctx.basis.n_modes);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.canonical_json)));
  ctx.config_hash = buf;
  return ctx;
}

namespace detail {

inline CsvWriter make_writer(const RunContext& ctx) {
  return CsvWriter(ctx.config_hash, ctx.cfg.seed);
}

inline std::string cloud_csv(const RunContext& ctx, const Cloud& cloud) {
  CsvWriter w = make_writer(ctx);
  w.comment("cloud: " + cloud.provenance);
  std::vector<std::string> cols;
  for (int k = 0; k < ctx.basis.n_modes; ++k) cols.push_back("u" + std::to_string(k));
  for (int k = 0; k < ctx.basis.n_modes; ++k) cols.push_back("v" + std::to_string(k));
  cols.push_back("x_norm");
  w.columns(cols);
  for (const State& p : cloud.points) {
    Vec row = p.u;
    row.insert(row.end(), p.v.begin(), p.v.end());
    row.push_back(p.x_norm(ctx.basis));
    w.row(row);
  }
  return w.str();
}

inline void run_simulate(const RunContext& ctx, ArtifactSink& sink) {
  const auto& sim = ctx.cfg.simulate;
  State y0 = zero_state(ctx.basis);
  if (sim.initial_u) {
    if (static_cast<int>(sim.initial_u->size()) > ctx.basis.n_modes)
      throw ConfigError("simulate.initial_u", "more coefficients than modes");
    std::copy(sim.initial_u->begin(), sim.initial_u->end(), y0.u.begin());
    if (sim.initial_v) std::copy(sim.initial_v->begin(), sim.initial_v->end(), y0.v.begin());
  } else {
    y0 = sample_ball(ctx.basis, sim.initial_radius, 1, ctx.cfg.seed).front();
  }
  SolverConfig solver = ctx.solver;
  solver.record_energy = true;
  solver.energy_eps = sim.energy_eps;
  const Trajectory traj = evolve(ctx.symbol, sim.tau, sim.t_end, y0, ctx.damping, ctx.nonlin,
                                 ctx.basis, solver);

  CsvWriter tw = make_writer(ctx);
  tw.comment("trajectory: symbol=" + to_string(ctx.symbol.kind()) + " damping=" +
             ctx.damping.name + " nonlinearity=" + ctx.nonlin.name);
  std::vector<std::string> cols = {"time", "x_norm", "e0"};
  for (int k = 0; k < ctx.basis.n_modes; ++k) cols.push_back("u" + std::to_string(k));
  for (int k = 0; k < ctx.basis.n_modes; ++k) cols.push_back("v" + std::to_string(k));
  tw.columns(cols);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    Vec row = {traj.times[i], traj.states[i].x_norm(ctx.basis),
               energy0(traj.states[i], ctx.nonlin, ctx.basis)};
    row.insert(row.end(), traj.states[i].u.begin(), traj.states[i].u.end());
    row.insert(row.end(), traj.states[i].v.begin(), traj.states[i].v.end());
    tw.row(row);
  }
  sink.write("trajectory.csv", tw.str());

  CsvWriter ew = make_writer(ctx);
  ew.comment("per-step energy records; w = 1 + <h(u_t),u_t>");
  ew.columns({"time", "e0", "e_eps", "w", "forcing_power"});
  for (const EnergySample& s : traj.energy)
    ew.row({s.time, s.e0, s.e_eps, s.damping_power_w, s.forcing_power});
  sink.write("energy.csv", ew.str());

  std::string summary = "simulate\n";
  summary += "steps: " + std::to_string(traj.energy.size() - 1) + "\n";
  summary += "final x_norm: " + fmt(traj.states.back().x_norm(ctx.basis)) + "\n";
  summary += "final e0: " + fmt(traj.energy.back().e0) + "\n";
  sink.write("summary.txt", summary);
}

inline void run_audit(const RunContext& ctx, ArtifactSink& sink) {
  const auto& a = ctx.cfg.audit;
  const AuditReport dr = audit_damping(ctx.damping, a.s_max, a.s0, a.grid_points);
  const AuditReport nr =
      audit_nonlinearity(ctx.nonlin, ctx.basis.lambda1(), a.s_max, a.s0, a.grid_points);

  CsvWriter w = make_writer(ctx);
  w.columns({"target", "check", "pass", "margin"});
  std::string summary = "audit\n";
  auto emit = [&](const std::string& target, const AuditReport& rep) {
    for (const AuditCheck& c : rep.checks) {
      w.row_mixed({target, c.name, c.pass ? "1" : "0", fmt(c.margin)});
      summary += target + "." + c.name + ": " + (c.pass ? "pass" : "FAILED") +
                 " (margin " + fmt(c.margin) + ")\n";
    }
    for (const auto& [k, v] : rep.fitted) {
      w.row_mixed({target, "fitted:" + k, "1", fmt(v)});
      summary += target + " fitted " + k + " = " + fmt(v) + "\n";
    }
  };
  emit("damping", dr);
  emit("nonlinearity", nr);
  sink.write("audit.csv", w.str());
  sink.write("summary.txt", summary);
}

inline void run_absorbing(const RunContext& ctx, ArtifactSink& sink) {
  const auto& ab = ctx.cfg.absorbing;
  const std::vector<State> initials =
      sample_ball(ctx.basis, ab.ball_radius, ab.count, ctx.cfg.seed);
  const HullSample hull = hull_sample(ctx.symbol, ctx.cfg.forcing.hull_shifts);
  const AbsorbReport rep =
      absorbing_estimate(initials, hull, ab.horizon, ctx.damping, ctx.nonlin, ctx.basis,
                         ctx.solver, ab.uniformity_factor, ctx.cfg.workers);

  CsvWriter w = make_writer(ctx);
  w.comment("uniform absorbing-set estimate");
  w.comment("rho: " + fmt(rep.rho));
  w.comment("m_fit: " + fmt(rep.m_fit));
  w.columns({"state_index", "symbol_index", "entry_time", "post_entry_sup",
             "post_window_sup", "e0_initial", "m_ratio"});
  for (const AbsorbEntry& e : rep.entries)
    w.row({static_cast<double>(e.state_index), static_cast<double>(e.symbol_index),
           e.entry_time, e.post_entry_sup, e.post_window_sup, e.e0_initial, e.m_ratio});
  sink.write("absorb.csv", w.str());

  std::string summary = "absorbing\n";
  summary += "rho: " + fmt(rep.rho) + "\n";
  summary += "m_fit: " + fmt(rep.m_fit) + "\n";
  summary += "hull_rho_ratio: " + fmt(rep.hull_rho_ratio) + "\n";
  summary += "hull_entry_spread: " + fmt(rep.hull_entry_spread) + "\n";
  summary += std::string("all_entered: ") + (rep.all_entered ? "yes" : "no") + "\n";
  summary += std::string("uniform: ") + (rep.uniform ? "yes" : "no") + "\n";
  sink.write("summary.txt", summary);
}

inline std::vector<PairRun> sample_pair_runs(const RunContext& ctx, double t_max,
                                             int record_stride_override = 0) {
  const auto& cc = ctx.cfg.compactness;
  const HullSample hull = hull_sample(ctx.symbol, ctx.cfg.forcing.hull_shifts);
  std::mt19937_64 rng(ctx.cfg.seed + 1);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(hull.members.size()) - 1);
  const std::vector<State> states =
      sample_ball(ctx.basis, cc.ball_radius, 2 * cc.pairs, ctx.cfg.seed);

  SolverConfig solver = ctx.solver;
  if (record_stride_override > 0) solver.record_stride = record_stride_override;

  std::vector<std::pair<int, int>> picks(cc.pairs);
  for (auto& p : picks) p = {pick(rng), pick(rng)};

  std::vector<PairRun> pairs(cc.pairs);
  parallel_for(cc.pairs, ctx.cfg.workers, [&](int i) {
    const Symbol& sa = hull.members[picks[i].first];
    const Symbol& sb = hull.members[picks[i].second];
    PairRun pr;
    pr.sigma_a = sa;
    pr.sigma_b = sb;
    pr.a = evolve(sa, 0.0, t_max, states[2 * i], ctx.damping, ctx.nonlin, ctx.basis, solver);
    pr.b = evolve(sb, 0.0, t_max, states[2 * i + 1], ctx.damping, ctx.nonlin, ctx.basis,
                  solver);
    pairs[i] = std::move(pr);
  });
  return pairs;
}

inline void run_compactness(const RunContext& ctx, ArtifactSink& sink) {
  const auto& cc = ctx.cfg.compactness;
  if (cc.t_list.empty()) throw ConfigError("compactness.t_list", "must be non-empty");
  const double t_max = *std::max_element(cc.t_list.begin(), cc.t_list.end());
  const double t_min = *std::min_element(cc.t_list.begin(), cc.t_list.end());
  // Record densely enough for the shortest T in the list.
  int stride = std::max(1, static_cast<int>(t_min / 200.0 / ctx.solver.dt));
  const std::vector<PairRun> pairs = sample_pair_runs(ctx, t_max, stride);
  const double c_delta = damping_gap_constant(ctx.damping, cc.delta, cc.gap_s_max,
                                              cc.gap_grid_points, ctx.cfg.seed + 2);

  CsvWriter w = make_writer(ctx);
  w.comment("master-bound reports; slack = c_m/T + phi/T - E_w(T)");
  w.columns({"pair", "delta", "T", "c_delta", "e_w_T", "phi", "phi_f_double", "phi_g_double",
             "phi_f_single", "phi_h_w", "phi_f_w", "phi_g_w", "c_m", "slack"});
  int total = 0, passed = 0;
  double ew_scale = 0.0;
  std::vector<CompactnessReport> reports;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (double T : cc.t_list) {
      const CompactnessReport rep = verify_master_bound(pairs[i], cc.delta, T, c_delta,
                                                        ctx.nonlin, ctx.damping, ctx.basis);
      reports.push_back(rep);
      ew_scale = std::max({ew_scale, rep.e_w_T, difference_energy(pairs[i], 0, ctx.basis)});
      w.row({static_cast<double>(i), rep.delta, rep.T, rep.c_delta, rep.e_w_T, rep.phi_total,
             rep.phi_components[0], rep.phi_components[1], rep.phi_components[2],
             rep.phi_components[3], rep.phi_components[4], rep.phi_components[5],
             rep.c_m_value, rep.slack});
    }
  for (const auto& rep : reports) {
    ++total;
    if (rep.slack >= -1e-3 * ew_scale) ++passed;
  }
  sink.write("compactness.csv", w.str());

  std::string summary = "compactness\n";
  summary += "c_delta: " + fmt(c_delta) + "\n";
  summary += "pairs: " + std::to_string(pairs.size()) + "\n";
  summary += "pass_fraction: " + fmt(total ? static_cast<double>(passed) / total : 0.0) + "\n";
  // Criterion table: smallest tested T with E_w(T) <= eps + phi/T + c_m/T across pairs.
  for (double eps : {0.5, 0.1, 0.05}) {
    double best_T = -1.0;
    for (double T : cc.t_list) {
      bool ok = true;
      for (const auto& rep : reports)
        if (rep.T == T && rep.e_w_T > eps + rep.phi_total / T + rep.c_m_value / T) ok = false;
      if (ok) {
        best_T = T;
        break;
      }
    }
    summary += "T(eps=" + fmt(eps) + "): " + (best_T > 0 ? fmt(best_T) : "none") + "\n";
  }
  sink.write("summary.txt", summary);
}

inline void run_attractor(const RunContext& ctx, ArtifactSink& sink) {
  const auto& at = ctx.cfg.attractor;
  const std::vector<State> samples =
      sample_ball(ctx.basis, at.ball_radius, at.samples, ctx.cfg.seed);
  const HullSample hull = hull_sample(ctx.symbol, ctx.cfg.forcing.hull_shifts);
  const Cloud cloud = omega_limit_cloud(samples, hull, 0.0, at.sample_times, ctx.damping,
                                        ctx.nonlin, ctx.basis, ctx.solver, ctx.cfg.workers);
  sink.write("cloud.csv", cloud_csv(ctx, cloud));

  // Semidistance of the evolved set to the final cloud at each checkpoint.
  CsvWriter w = make_writer(ctx);
  w.comment("dist(U_sigma(t,0)B, omega-cloud) per checkpoint and hull symbol");
  w.columns({"time", "symbol_index", "semidist"});
  for (double t : at.sample_times) {
    for (std::size_t gj = 0; gj < hull.members.size(); ++gj) {
      Cloud evolved;
      for (const State& y : samples)
        cloud_insert(evolved,
                     evolve_final(hull.members[gj], 0.0, t, y, ctx.damping, ctx.nonlin,
                                  ctx.basis, ctx.solver),
                     ctx.basis, 0.0);
      w.row({t, static_cast<double>(gj), hausdorff_semidist(evolved, cloud, ctx.basis)});
    }
  }
  sink.write("semidist.csv", w.str());

  double max_norm = 0.0;
  for (const State& p : cloud.points) max_norm = std::max(max_norm, p.x_norm(ctx.basis));
  std::string summary = "attractor\n";
  summary += "cloud_points: " + std::to_string(cloud.points.size()) + "\n";
  summary += "cloud_max_x_norm: " + fmt(max_norm) + "\n";
  sink.write("summary.txt", summary);
}

inline void run_pullback(const RunContext& ctx, ArtifactSink& sink) {
  const auto& pb = ctx.cfg.pullback;
  const std::vector<State> samples =
      sample_ball(ctx.basis, pb.ball_radius, pb.samples, ctx.cfg.seed);
  const PullbackResult res =
      kernel_section_pullback(ctx.symbol, pb.phase, pb.horizons, samples, ctx.damping,
                              ctx.nonlin, ctx.basis, ctx.solver, ctx.cfg.workers);
  for (std::size_t k = 0; k < res.clouds.size(); ++k)
    sink.write("cloud_T" + std::to_string(static_cast<long long>(res.horizons[k])) + ".csv",
               cloud_csv(ctx, res.clouds[k]));

  CsvWriter w = make_writer(ctx);
  w.comment("semidistance between successive pullback horizons");
  w.columns({"horizon_from", "horizon_to", "semidist"});
  for (std::size_t k = 0; k + 1 < res.horizons.size(); ++k)
    w.row({res.horizons[k], res.horizons[k + 1], res.successive_semidist[k]});
  sink.write("semidist.csv", w.str());

  std::string summary = "pullback\n";
  for (std::size_t k = 0; k < res.successive_semidist.size(); ++k)
    summary += "semidist T" + fmt(res.horizons[k]) + "->T" + fmt(res.horizons[k + 1]) + ": " +
               fmt(res.successive_semidist[k]) + "\n";
  sink.write("summary.txt", summary);
}

}  // namespace detail

// Exit codes: 0 success, 2 config/schema error, 3 numerical abort.
inline int run_experiment(const ExperimentConfig& cfg, const std::string& timestamp,
                          std::string* error_out = nullptr) {
  try {
    const RunContext ctx = make_context(cfg);
    ArtifactSink sink(cfg.output_dir);
    if (cfg.experiment == "simulate") detail::run_simulate(ctx, sink);
    else if (cfg.experiment == "audit") detail::run_audit(ctx, sink);
    else if (cfg.experiment == "absorbing") detail::run_absorbing(ctx, sink);
    else if (cfg.experiment == "compactness") detail::run_compactness(ctx, sink);
    else if (cfg.experiment == "attractor") detail::run_attractor(ctx, sink);
    else if (cfg.experiment == "pullback") detail::run_pullback(ctx, sink);
    sink.write_manifest(timestamp);
    return 0;
  } catch (const ConfigError& e) {
    if (error_out) *error_out = e.what();
    return 2;
  } catch (const Error& e) {
    if (error_out) *error_out = e.what();
    return 3;
  }
}

// plot kinds: energy, semidist, cloud.
inline std::string plot_csv(const std::string& csv_path, const std::string& kind) {
  const CsvData data = read_csv(csv_path);
  if (kind == "energy") {
    const int tc = data.column("time"), ec = data.column("e0");
    if (tc < 0 || ec < 0) throw Error("plot: CSV lacks time/e0 columns");
    PlotSeries s;
    double emin = 1e300, emax = -1e300;
    for (const Vec& r : data.rows) {
      s.x.push_back(r[tc]);
      s.y.push_back(r[ec]);
      emin = std::min(emin, r[ec]);
      emax = std::max(emax, r[ec]);
    }
    return render_svg({s}, "E0 over time (max-min = " + detail::svg_num(emax - emin) + ")");
  }
  if (kind == "semidist") {
    int tc = data.column("time");
    if (tc < 0) tc = data.column("horizon_to");
    const int sc = data.column("semidist");
    if (tc < 0 || sc < 0) throw Error("plot: CSV lacks semidist columns");
    PlotSeries s;
    for (const Vec& r : data.rows) {
      s.x.push_back(r[tc]);
      s.y.push_back(r[sc]);
    }
    return render_svg({s}, "Hausdorff semidistance");
  }
  if (kind == "cloud") {
    const int u0 = data.column("u0"), u1 = data.column("u1");
    if (u0 < 0) throw Error("plot: CSV lacks modal columns");
    PlotSeries s;
    for (const Vec& r : data.rows) {
      s.x.push_back(r[u0]);
      s.y.push_back(u1 >= 0 ? r[u1] : 0.0);
    }
    return render_svg({s}, "cloud projection (u0, u1)", true);
  }
  throw Error("plot: unknown kind '" + kind + "'");
}

}  // namespace attractor

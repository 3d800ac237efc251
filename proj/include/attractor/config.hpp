#pragma once

// Experiment configuration: a single JSON document, validated with
// field-level error messages (ConfigError carries the offending path).

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attractor/core.hpp"
#include "attractor/dynamics.hpp"
#include "attractor/errors.hpp"
#include "attractor/forcing.hpp"
#include "attractor/process.hpp"
#include "attractor/spectral.hpp"

namespace attractor {

using nlohmann::json;

struct BasisConfig {
  int dim = 1;
  int modes = 32;
  std::vector<double> lengths{3.141592653589793};
};

struct DampingConfig {
  std::string name = "linear";
  double k = 1.0;
  int p = 3;
};

struct NonlinearityConfig {
  std::string name = "zero";
  double q = 1.0;
};

struct ForcingConfig {
  std::string kind = "zero";
  double amplitude = 1.0;
  int mode = 1;                    // 1-based modal index of the profile
  std::vector<double> frequencies{1.0};
  std::vector<double> phases;
  std::vector<double> hull_shifts{0.0};
};

struct SolverConfigIn {
  double dt = 1e-3;
  std::string scheme = "rk4_explicit";
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  int record_stride = 1;
};

struct SimulateConfig {
  double tau = 0.0;
  double t_end = 10.0;
  double initial_radius = 1.0;    // used when no explicit initial data is given
  std::optional<Vec> initial_u;
  std::optional<Vec> initial_v;
  double energy_eps = 0.1;
};

struct AuditConfig {
  double s_max = 50.0;
  double s0 = 1.0;
  int grid_points = 20001;
};

struct AbsorbingConfig {
  double ball_radius = 20.0;
  int count = 16;
  double horizon = 40.0;
  double uniformity_factor = 1.5;
  double gamma = 1.0;
  double n_const = 1.0;
};

struct CompactnessConfig {
  double delta = 0.01;
  std::vector<double> t_list{5.0, 10.0, 20.0};
  int pairs = 20;
  double ball_radius = 5.0;
  double gap_s_max = 10.0;
  int gap_grid_points = 801;
};

struct AttractorConfig {
  int samples = 8;
  double ball_radius = 5.0;
  std::vector<double> sample_times{10.0, 20.0, 30.0, 40.0, 50.0, 60.0};
};

struct PullbackConfig {
  double phase = 0.0;
  std::vector<double> horizons{10.0, 20.0, 40.0};
  int samples = 8;
  double ball_radius = 1.0;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output_dir = "out";
  int workers = 1;
  BasisConfig basis;
  DampingConfig damping;
  NonlinearityConfig nonlinearity;
  ForcingConfig forcing;
  SolverConfigIn solver;
  SimulateConfig simulate;
  AuditConfig audit;
  AbsorbingConfig absorbing;
  CompactnessConfig compactness;
  AttractorConfig attractor;
  PullbackConfig pullback;

  std::string canonical_json;   // re-serialized config, hashed for provenance
};

namespace detail {

inline const json& require(const json& j, const std::string& parent, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(parent.empty() ? key : parent + "." + key,
                                          "missing required field");
  return j.at(key);
}

template <typename T>
T get_or(const json& j, const std::string& parent, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(parent.empty() ? key : parent + "." + key, "wrong type");
  }
}

template <typename T>
T get_req(const json& j, const std::string& parent, const std::string& key) {
  const json& v = require(j, parent, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(parent.empty() ? key : parent + "." + key, "wrong type");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  using detail::get_or;
  using detail::get_req;
  ExperimentConfig c;
  c.experiment = get_req<std::string>(j, "", "experiment");
  const std::vector<std::string> kinds = {"simulate",    "audit",     "absorbing",
                                          "compactness", "attractor", "pullback"};
  if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end())
    throw ConfigError("experiment", "unknown experiment kind '" + c.experiment + "'");
  if (j.contains("seed")) {
    c.seed = get_req<std::uint64_t>(j, "", "seed");
    c.seed_given = true;
  }
  c.output_dir = get_or<std::string>(j, "", "output_dir", c.output_dir);
  c.workers = get_or<int>(j, "", "workers", c.workers);

  if (j.contains("basis")) {
    const json& b = j.at("basis");
    c.basis.dim = get_or<int>(b, "basis", "dim", c.basis.dim);
    c.basis.modes = get_or<int>(b, "basis", "modes", c.basis.modes);
    c.basis.lengths = get_or<std::vector<double>>(b, "basis", "lengths", c.basis.lengths);
  }
  if (c.basis.dim != 1 && c.basis.dim != 2) throw ConfigError("basis.dim", "must be 1 or 2");
  if (c.basis.modes < 1) throw ConfigError("basis.modes", "must be >= 1");
  if (static_cast<int>(c.basis.lengths.size()) != c.basis.dim)
    throw ConfigError("basis.lengths", "must have one entry per dimension");
  for (double l : c.basis.lengths)
    if (!(l > 0.0)) throw ConfigError("basis.lengths", "entries must be positive");

  if (j.contains("damping")) {
    const json& d = j.at("damping");
    c.damping.name = get_or<std::string>(d, "damping", "name", c.damping.name);
    c.damping.k = get_or<double>(d, "damping", "k", c.damping.k);
    c.damping.p = get_or<int>(d, "damping", "p", c.damping.p);
  }
  if (j.contains("nonlinearity")) {
    const json& d = j.at("nonlinearity");
    c.nonlinearity.name = get_or<std::string>(d, "nonlinearity", "name", c.nonlinearity.name);
    c.nonlinearity.q = get_or<double>(d, "nonlinearity", "q", c.nonlinearity.q);
  }
  if (j.contains("forcing")) {
    const json& f = j.at("forcing");
    c.forcing.kind = get_or<std::string>(f, "forcing", "kind", c.forcing.kind);
    c.forcing.amplitude = get_or<double>(f, "forcing", "amplitude", c.forcing.amplitude);
    c.forcing.mode = get_or<int>(f, "forcing", "mode", c.forcing.mode);
    c.forcing.frequencies =
        get_or<std::vector<double>>(f, "forcing", "frequencies", c.forcing.frequencies);
    c.forcing.phases = get_or<std::vector<double>>(f, "forcing", "phases", c.forcing.phases);
    c.forcing.hull_shifts =
        get_or<std::vector<double>>(f, "forcing", "hull_shifts", c.forcing.hull_shifts);
    if (c.forcing.mode < 1) throw ConfigError("forcing.mode", "must be >= 1");
  }

  {
    const json s = j.contains("solver") ? j.at("solver") : json::object();
    c.solver.dt = detail::get_req<double>(s, "solver", "dt");
    if (!(c.solver.dt > 0.0)) throw ConfigError("solver.dt", "must be > 0");
    c.solver.scheme = get_or<std::string>(s, "solver", "scheme", c.solver.scheme);
    if (c.solver.scheme != "rk4_explicit" && c.solver.scheme != "imex_midpoint")
      throw ConfigError("solver.scheme", "must be rk4_explicit or imex_midpoint");
    c.solver.newton_tol = get_or<double>(s, "solver", "newton_tol", c.solver.newton_tol);
    if (!(c.solver.newton_tol > 0.0)) throw ConfigError("solver.newton_tol", "must be > 0");
    c.solver.newton_max_iter =
        get_or<int>(s, "solver", "newton_max_iter", c.solver.newton_max_iter);
    c.solver.record_stride = get_or<int>(s, "solver", "record_stride", c.solver.record_stride);
    if (c.solver.record_stride < 1) throw ConfigError("solver.record_stride", "must be >= 1");
  }

  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    c.simulate.tau = get_or<double>(s, "simulate", "tau", c.simulate.tau);
    c.simulate.t_end = get_or<double>(s, "simulate", "t_end", c.simulate.t_end);
    c.simulate.initial_radius =
        get_or<double>(s, "simulate", "initial_radius", c.simulate.initial_radius);
    c.simulate.energy_eps = get_or<double>(s, "simulate", "energy_eps", c.simulate.energy_eps);
    if (s.contains("initial_u")) c.simulate.initial_u = get_req<Vec>(s, "simulate", "initial_u");
    if (s.contains("initial_v")) c.simulate.initial_v = get_req<Vec>(s, "simulate", "initial_v");
  }
  if (j.contains("audit")) {
    const json& a = j.at("audit");
    c.audit.s_max = get_or<double>(a, "audit", "s_max", c.audit.s_max);
    c.audit.s0 = get_or<double>(a, "audit", "s0", c.audit.s0);
    c.audit.grid_points = get_or<int>(a, "audit", "grid_points", c.audit.grid_points);
  }
  if (j.contains("absorbing")) {
    const json& a = j.at("absorbing");
    c.absorbing.ball_radius = get_or<double>(a, "absorbing", "ball_radius", c.absorbing.ball_radius);
    c.absorbing.count = get_or<int>(a, "absorbing", "count", c.absorbing.count);
    c.absorbing.horizon = get_or<double>(a, "absorbing", "horizon", c.absorbing.horizon);
    c.absorbing.uniformity_factor =
        get_or<double>(a, "absorbing", "uniformity_factor", c.absorbing.uniformity_factor);
    c.absorbing.gamma = get_or<double>(a, "absorbing", "gamma", c.absorbing.gamma);
    c.absorbing.n_const = get_or<double>(a, "absorbing", "n_const", c.absorbing.n_const);
  }
  if (j.contains("compactness")) {
    const json& a = j.at("compactness");
    c.compactness.delta = get_or<double>(a, "compactness", "delta", c.compactness.delta);
    c.compactness.t_list =
        get_or<std::vector<double>>(a, "compactness", "t_list", c.compactness.t_list);
    c.compactness.pairs = get_or<int>(a, "compactness", "pairs", c.compactness.pairs);
    c.compactness.ball_radius =
        get_or<double>(a, "compactness", "ball_radius", c.compactness.ball_radius);
    c.compactness.gap_s_max =
        get_or<double>(a, "compactness", "gap_s_max", c.compactness.gap_s_max);
    c.compactness.gap_grid_points =
        get_or<int>(a, "compactness", "gap_grid_points", c.compactness.gap_grid_points);
  }
  if (j.contains("attractor")) {
    const json& a = j.at("attractor");
    c.attractor.samples = get_or<int>(a, "attractor", "samples", c.attractor.samples);
    c.attractor.ball_radius =
        get_or<double>(a, "attractor", "ball_radius", c.attractor.ball_radius);
    c.attractor.sample_times =
        get_or<std::vector<double>>(a, "attractor", "sample_times", c.attractor.sample_times);
  }
  if (j.contains("pullback")) {
    const json& a = j.at("pullback");
    c.pullback.phase = get_or<double>(a, "pullback", "phase", c.pullback.phase);
    c.pullback.horizons =
        get_or<std::vector<double>>(a, "pullback", "horizons", c.pullback.horizons);
    c.pullback.samples = get_or<int>(a, "pullback", "samples", c.pullback.samples);
    c.pullback.ball_radius =
        get_or<double>(a, "pullback", "ball_radius", c.pullback.ball_radius);
  }

  const bool randomized = c.experiment != "audit" &&
                          !(c.experiment == "simulate" && c.simulate.initial_u.has_value());
  if (randomized && !c.seed_given)
    throw ConfigError("seed", "required for randomized experiments");

  c.canonical_json = j.dump(2);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

// ---- builders -------------------------------------------------------------

inline Basis make_basis(const BasisConfig& c) {
  return build_basis(c.dim, c.modes, c.lengths);
}

inline DampingSpec make_damping(const DampingConfig& c) {
  if (c.name == "linear") return make_linear_damping(c.k);
  if (c.name == "power") return make_power_damping(c.p);
  if (c.name == "arctan_linear") return make_arctan_damping(c.k);
  if (c.name == "zero")
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, 1.0, 1.0};
  throw ConfigError("damping.name", "unknown damping '" + c.name + "'");
}

inline NonlinearitySpec make_nonlinearity(const NonlinearityConfig& c) {
  if (c.name == "zero") return make_zero_nonlinearity();
  if (c.name == "linear") return make_linear_nonlinearity();
  if (c.name == "cubic_minus_u") return make_cubic_minus_u();
  if (c.name == "cubic") return make_cubic_nonlinearity();
  if (c.name == "power_minus_u") return make_power_minus_u(c.q);
  throw ConfigError("nonlinearity.name", "unknown nonlinearity '" + c.name + "'");
}

inline Symbol make_symbol(const ForcingConfig& c, int n_modes) {
  Vec profile(n_modes, 0.0);
  if (c.mode <= n_modes) profile[c.mode - 1] = c.amplitude;
  if (c.kind == "zero") return Symbol::zero();
  if (c.kind == "constant") return Symbol::constant(profile);
  if (c.kind == "periodic") {
    const double omega = c.frequencies.empty() ? 1.0 : c.frequencies[0];
    const double phase = c.phases.empty() ? 0.0 : c.phases[0];
    return Symbol::periodic(profile, omega, phase);
  }
  if (c.kind == "quasiperiodic") {
    std::vector<SymbolComponent> comps;
    for (std::size_t i = 0; i < c.frequencies.size(); ++i)
      comps.push_back({profile, c.frequencies[i], i < c.phases.size() ? c.phases[i] : 0.0});
    return Symbol::quasiperiodic(std::move(comps));
  }
  if (c.kind == "ramped_switch") return Symbol::ramped_switch(profile);
  throw ConfigError("forcing.kind", "unknown forcing kind '" + c.kind + "'");
}

inline SolverConfig make_solver(const SolverConfigIn& c) {
  SolverConfig s;
  s.dt = c.dt;
  s.scheme = c.scheme == "imex_midpoint" ? Scheme::imex_midpoint : Scheme::rk4_explicit;
  s.newton_tol = c.newton_tol;
  s.newton_max_iter = c.newton_max_iter;
  s.record_stride = c.record_stride;
  return s;
}

}  // namespace attractor

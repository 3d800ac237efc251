#pragma once

// Damping h and nonlinearity f as value objects with structural metadata,
// plus numerical audits of the structural hypotheses:
//   h in C^1, h(0)=0, strictly increasing, tail-coercive h', growth
//   |h(s)| <= C1 (1+|s|^p) with p in [1,5);
//   f in C^1, growth |f'(s)| <= C2 (1+|s|^q) with q in [0,2], and the
//   tail sign condition f(s)/s > -lambda1.
// "liminf at infinity" is audited as a minimum over the finite tail
// [S0, S_max]; the margin is reported, never silently assumed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "attractor/core.hpp"
#include "attractor/errors.hpp"

namespace attractor {

using ScalarFn = std::function<double(double)>;

struct DampingSpec {
  std::string name;
  ScalarFn h;
  ScalarFn h_prime;
  double growth_exponent = 1.0;   // p in [1,5)
  double growth_constant = 1.0;   // C1 of |h(s)| <= C1(1+|s|^p)
};

struct NonlinearitySpec {
  std::string name;
  ScalarFn f;
  ScalarFn f_prime;
  ScalarFn F;                     // antiderivative, F(0)=0
  double growth_exponent = 0.0;   // q in [0,2]
  double growth_constant = 1.0;   // C2 of |f'(s)| <= C2(1+|s|^q)
};

struct AuditCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  std::map<std::string, double> fitted;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const AuditCheck& check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw Error("audit check not found: " + name);
  }
};

namespace detail {

inline Vec audit_grid(double s_max, int grid_points) {
  if (grid_points < 2) throw Error("audit: grid_points must be >= 2");
  if (2.0 * s_max / (grid_points - 1) >= 1e-2 * s_max + 1e-15)
    throw Error("audit: grid spacing must be < 1e-2 * S_max");
  Vec g(grid_points);
  for (int i = 0; i < grid_points; ++i)
    g[i] = -s_max + 2.0 * s_max * i / (grid_points - 1);
  return g;
}

inline void require_finite(double value, double s) {
  if (!std::isfinite(value))
    throw Error("audit: non-finite function value at s=" + std::to_string(s));
}

}  // namespace detail

// Audits (1.4)-(1.6) plus fits of the derived pointwise inequalities
//   |h(s)|^{(p+1)/p} <= C (1 + h(s) s)            ["c_growth_power"]
//   (alpha/2) s^2    <= h(s) s + C                ["coercivity_offset"]
// where alpha is the measured tail minimum of h'.
inline AuditReport audit_damping(const DampingSpec& spec, double s_max,
                                 double tail_start, int grid_points) {
  if (!(tail_start < s_max)) throw Error("audit_damping: S0 must be < S_max");
  AuditReport rep;
  const Vec grid = detail::audit_grid(s_max, grid_points);

  const double h0 = spec.h(0.0);
  detail::require_finite(h0, 0.0);
  rep.checks.push_back({"h_zero", std::abs(h0) < 1e-12, std::abs(h0)});

  double min_hp = std::numeric_limits<double>::infinity();
  double tail_min_hp = std::numeric_limits<double>::infinity();
  double growth_margin = std::numeric_limits<double>::infinity();
  int strict_count = 0;
  for (double s : grid) {
    const double hv = spec.h(s);
    const double hp = spec.h_prime(s);
    detail::require_finite(hv, s);
    detail::require_finite(hp, s);
    min_hp = std::min(min_hp, hp);
    if (hp > 0.0) ++strict_count;
    if (std::abs(s) >= tail_start) tail_min_hp = std::min(tail_min_hp, hp);
    growth_margin = std::min(
        growth_margin,
        spec.growth_constant * (1.0 + std::pow(std::abs(s), spec.growth_exponent)) -
            std::abs(hv));
  }
  const double strict_fraction = static_cast<double>(strict_count) / grid.size();
  rep.checks.push_back({"monotone", min_hp >= 0.0 && strict_fraction >= 0.99, min_hp});
  rep.checks.push_back({"tail_coercive", tail_min_hp > 0.0, tail_min_hp});
  rep.checks.push_back({"growth", growth_margin >= 0.0, growth_margin});
  rep.fitted["strict_fraction"] = strict_fraction;
  rep.fitted["coercivity_alpha"] = tail_min_hp;

  // Fit (5.10): smallest C with |h|^{(p+1)/p} <= C (1 + h s) on the grid.
  // For monotone h through 0, h(s)s >= 0 and the denominator is >= 1.
  const double expo = (spec.growth_exponent + 1.0) / spec.growth_exponent;
  double c510 = 0.0;
  bool c510_valid = true;
  for (double s : grid) {
    const double hv = spec.h(s);
    const double denom = 1.0 + hv * s;
    if (denom <= 0.0) {
      c510_valid = false;
      continue;
    }
    c510 = std::max(c510, std::pow(std::abs(hv), expo) / denom);
  }
  rep.fitted["c_growth_power"] = c510_valid ? c510 : std::numeric_limits<double>::infinity();

  // Fit (5.11)-style offset: (alpha/2) s^2 <= h(s) s + C.
  const double alpha = tail_min_hp > 0.0 ? tail_min_hp : 0.0;
  double offset = 0.0;
  for (double s : grid)
    offset = std::max(offset, 0.5 * alpha * s * s - spec.h(s) * s);
  rep.fitted["coercivity_offset"] = offset;
  return rep;
}

inline AuditReport audit_nonlinearity(const NonlinearitySpec& spec, double lambda1,
                                      double s_max, double tail_start, int grid_points) {
  if (!(tail_start < s_max)) throw Error("audit_nonlinearity: S0 must be < S_max");
  AuditReport rep;
  const Vec grid = detail::audit_grid(s_max, grid_points);

  double growth_margin = std::numeric_limits<double>::infinity();
  double tail_min = std::numeric_limits<double>::infinity();
  double f_consistency = 0.0;
  const double eps = 1e-5;
  for (double s : grid) {
    const double fv = spec.f(s);
    const double fp = spec.f_prime(s);
    detail::require_finite(fv, s);
    detail::require_finite(fp, s);
    growth_margin = std::min(
        growth_margin,
        spec.growth_constant * (1.0 + std::pow(std::abs(s), spec.growth_exponent)) -
            std::abs(fp));
    if (std::abs(s) >= tail_start) tail_min = std::min(tail_min, fv / s);
    // Relative to the local scale of f: the raw difference quotient loses
    // ~|F(s)| * 1e-16 / eps to cancellation, which swamps an absolute
    // tolerance for quartic F at |s| ~ 50.
    const double fd = (spec.F(s + eps) - spec.F(s - eps)) / (2.0 * eps);
    f_consistency = std::max(f_consistency, std::abs(fd - fv) / (1.0 + std::abs(fv)));
  }
  rep.checks.push_back({"growth", growth_margin >= 0.0, growth_margin});
  rep.checks.push_back({"tail_sign", tail_min > -lambda1, tail_min + lambda1});
  rep.checks.push_back({"antiderivative", f_consistency < 1e-6, f_consistency});
  rep.fitted["tail_min_f_over_s"] = tail_min;
  rep.fitted["lambda1"] = lambda1;
  return rep;
}

inline Vec apply_pointwise(const ScalarFn& func, const Vec& grid) {
  Vec out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = func(grid[i]);
    if (!std::isfinite(out[i])) throw NonFiniteError(i, grid[i]);
  }
  return out;
}

// ---- built-in families ----------------------------------------------------

// h(s) = k s, k > 0.
inline DampingSpec make_linear_damping(double k = 1.0) {
  if (!(k > 0.0)) throw Error("linear damping: k must be > 0");
  return {"linear", [k](double s) { return k * s; }, [k](double) { return k; },
          1.0, std::max(1.0, k)};
}

// h(s) = s + |s|^{p-1} s, p in {2,3}.
inline DampingSpec make_power_damping(int p) {
  if (p != 2 && p != 3) throw Error("power damping: p must be 2 or 3");
  if (p == 2)
    return {"power2",
            [](double s) { return s + std::abs(s) * s; },
            [](double s) { return 1.0 + 2.0 * std::abs(s); }, 2.0, 1.25};
  return {"power3",
          [](double s) { return s + s * s * s; },
          [](double s) { return 1.0 + 3.0 * s * s; }, 3.0, 1.25};
}

// Saturating arctan plus a linear tail with slope k.
inline DampingSpec make_arctan_damping(double k = 0.5) {
  if (!(k > 0.0)) throw Error("arctan damping: k must be > 0");
  return {"arctan_linear",
          [k](double s) { return std::atan(s) + k * s; },
          [k](double s) { return 1.0 / (1.0 + s * s) + k; }, 1.0,
          std::max(2.0, k + 2.0)};
}

// Tabulated damping with linear interpolation (constant extrapolation of the
// end slopes beyond the table).
inline DampingSpec make_tabulated_damping(const Vec& s_values, const Vec& h_values,
                                          double p, double c1) {
  if (s_values.size() != h_values.size() || s_values.size() < 2)
    throw Error("tabulated damping: need matching tables with >= 2 points");
  auto interp = [s_values, h_values](double s) {
    auto it = std::upper_bound(s_values.begin(), s_values.end(), s);
    std::size_t i = (it == s_values.begin())
                        ? 1
                        : std::min<std::size_t>(it - s_values.begin(), s_values.size() - 1);
    const double t = (s - s_values[i - 1]) / (s_values[i] - s_values[i - 1]);
    return h_values[i - 1] + t * (h_values[i] - h_values[i - 1]);
  };
  auto slope = [s_values, h_values](double s) {
    auto it = std::upper_bound(s_values.begin(), s_values.end(), s);
    std::size_t i = (it == s_values.begin())
                        ? 1
                        : std::min<std::size_t>(it - s_values.begin(), s_values.size() - 1);
    return (h_values[i] - h_values[i - 1]) / (s_values[i] - s_values[i - 1]);
  };
  return {"tabulated", interp, slope, p, c1};
}

inline NonlinearitySpec make_zero_nonlinearity() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }, 0.0, 1.0};
}

// f(u) = u.
inline NonlinearitySpec make_linear_nonlinearity() {
  return {"linear", [](double s) { return s; }, [](double) { return 1.0; },
          [](double s) { return 0.5 * s * s; }, 0.0, 1.0};
}

// f(u) = u^3 - u, the double-well derivative; critical growth q = 2.
inline NonlinearitySpec make_cubic_minus_u() {
  return {"cubic_minus_u",
          [](double s) { return s * s * s - s; },
          [](double s) { return 3.0 * s * s - 1.0; },
          [](double s) { return 0.25 * s * s * s * s - 0.5 * s * s; }, 2.0, 3.0};
}

// f(u) = u^3.
inline NonlinearitySpec make_cubic_nonlinearity() {
  return {"cubic",
          [](double s) { return s * s * s; },
          [](double s) { return 3.0 * s * s; },
          [](double s) { return 0.25 * s * s * s * s; }, 2.0, 3.0};
}

// f(u) = |u|^q u - u, subcritical for q < 2.
inline NonlinearitySpec make_power_minus_u(double q) {
  if (!(q >= 0.0 && q <= 2.0)) throw Error("power nonlinearity: q must be in [0,2]");
  return {"power_minus_u",
          [q](double s) { return std::pow(std::abs(s), q) * s - s; },
          [q](double s) { return (q + 1.0) * std::pow(std::abs(s), q) - 1.0; },
          [q](double s) { return std::pow(std::abs(s), q + 2.0) / (q + 2.0) - 0.5 * s * s; },
          q, q + 2.0};
}

}  // namespace attractor

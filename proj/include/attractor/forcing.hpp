#pragma once

// Time-dependent forcing symbols g(x,t) in modal coordinates, the translation
// action (T(s)g)(t) = g(t+s), finite hull samples, and the translation-bounded
// norms. Symbols are immutable value objects; evaluation is pure.
//
// The ramped_switch kind is translation bounded but drifts in frequency
// (instantaneous period ~ sqrt(t)), the stand-in for forcing that is not
// translation compact.

#include <cmath>
#include <string>
#include <vector>

#include "attractor/core.hpp"
#include "attractor/errors.hpp"

namespace attractor {

enum class SymbolKind { zero, constant, periodic, quasiperiodic, ramped_switch };

inline std::string to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::zero: return "zero";
    case SymbolKind::constant: return "constant";
    case SymbolKind::periodic: return "periodic";
    case SymbolKind::quasiperiodic: return "quasiperiodic";
    case SymbolKind::ramped_switch: return "ramped_switch";
  }
  return "?";
}

struct SymbolComponent {
  Vec profile;          // modal coefficients
  double omega = 0.0;   // 0 means a constant-in-time component
  double phase = 0.0;
};

class Symbol {
 public:
  Symbol() : kind_(SymbolKind::zero) {}
  Symbol(SymbolKind kind, std::vector<SymbolComponent> comps, double shift = 0.0)
      : kind_(kind), comps_(std::move(comps)), shift_(shift) {}

  static Symbol zero() { return Symbol(); }
  static Symbol constant(Vec profile) {
    return Symbol(SymbolKind::constant, {{std::move(profile), 0.0, 0.0}});
  }
  static Symbol periodic(Vec profile, double omega, double phase = 0.0) {
    return Symbol(SymbolKind::periodic, {{std::move(profile), omega, phase}});
  }
  static Symbol quasiperiodic(std::vector<SymbolComponent> comps) {
    return Symbol(SymbolKind::quasiperiodic, std::move(comps));
  }
  static Symbol ramped_switch(Vec profile) {
    return Symbol(SymbolKind::ramped_switch, {{std::move(profile), 0.0, 0.0}});
  }

  SymbolKind kind() const { return kind_; }
  double shift() const { return shift_; }
  const std::vector<SymbolComponent>& components() const { return comps_; }

  int n_modes() const {
    std::size_t n = 0;
    for (const auto& c : comps_) n = std::max(n, c.profile.size());
    return static_cast<int>(n);
  }

  // g(t) as a modal vector of length n (zero-padded / truncated).
  Vec evaluate(double t, int n) const {
    Vec out(n, 0.0);
    const double tt = t + shift_;
    for (const auto& c : comps_) {
      const double a = amplitude(c, tt);
      const std::size_t m = std::min<std::size_t>(n, c.profile.size());
      for (std::size_t i = 0; i < m; ++i) out[i] += a * c.profile[i];
    }
    return out;
  }
  Vec evaluate(double t) const { return evaluate(t, n_modes()); }

  // Analytic time derivative d/dt g(t).
  Vec evaluate_dt(double t, int n) const {
    Vec out(n, 0.0);
    const double tt = t + shift_;
    for (const auto& c : comps_) {
      const double da = amplitude_dt(c, tt);
      const std::size_t m = std::min<std::size_t>(n, c.profile.size());
      for (std::size_t i = 0; i < m; ++i) out[i] += da * c.profile[i];
    }
    return out;
  }
  Vec evaluate_dt(double t) const { return evaluate_dt(t, n_modes()); }

  // T(s): shifts compose additively and exactly in the shift field.
  Symbol translated(double s) const {
    Symbol out(*this);
    out.shift_ = shift_ + s;
    return out;
  }

 private:
  double amplitude(const SymbolComponent& c, double tt) const {
    if (kind_ == SymbolKind::ramped_switch) {
      return 0.5 * (1.0 + std::tanh(4.0 * std::sin(2.0 * std::sqrt(std::abs(tt) + 1.0))));
    }
    if (c.omega == 0.0) return 1.0;
    return std::sin(c.omega * tt + c.phase);
  }
  double amplitude_dt(const SymbolComponent& c, double tt) const {
    if (kind_ == SymbolKind::ramped_switch) {
      const double r = std::sqrt(std::abs(tt) + 1.0);
      const double th = std::tanh(4.0 * std::sin(2.0 * r));
      const double sgn = (tt > 0.0) ? 1.0 : (tt < 0.0 ? -1.0 : 0.0);
      return 2.0 * (1.0 - th * th) * std::cos(2.0 * r) * sgn / r;
    }
    if (c.omega == 0.0) return 0.0;
    return c.omega * std::cos(c.omega * tt + c.phase);
  }

  SymbolKind kind_;
  std::vector<SymbolComponent> comps_;
  double shift_ = 0.0;
};

struct HullSample {
  Symbol base;
  Vec shifts;
  std::vector<Symbol> members;
};

inline HullSample hull_sample(const Symbol& g0, Vec shifts) {
  bool has_zero = false;
  for (double s : shifts)
    if (s == 0.0) has_zero = true;
  if (!has_zero) shifts.insert(shifts.begin(), 0.0);
  HullSample hull;
  hull.base = g0;
  hull.shifts = shifts;
  for (double s : shifts) hull.members.push_back(g0.translated(s));
  return hull;
}

// sup_t int_t^{t+1} |g(s)|_{L^2}^2 ds over window starts sampled at dt_scan.
inline double l2b_norm(const Symbol& sigma, double t0, double t1, double dt_scan) {
  if (!(dt_scan > 0.0)) throw Error("l2b_norm: dt_scan must be > 0");
  if (!(t1 > t0 + 1.0)) throw Error("l2b_norm: scan window must be longer than 1");
  const int n = static_cast<int>(std::ceil((t1 - t0) / dt_scan)) + 1;
  Vec sq(n);
  for (int i = 0; i < n; ++i) {
    const Vec g = sigma.evaluate(t0 + i * dt_scan);
    sq[i] = dot(g, g);
  }
  const Vec cum = cumulative_trapezoid(sq, dt_scan);
  const int win = static_cast<int>(std::lround(1.0 / dt_scan));
  if (win < 1 || win >= n) throw Error("l2b_norm: dt_scan too coarse for unit window");
  double best = 0.0;
  for (int i = 0; i + win < n; ++i) best = std::max(best, cum[i + win] - cum[i]);
  return best;
}

// sup over sampled t of |g(t)|_{L^2}.
inline double linf_norm(const Symbol& sigma, double t0, double t1, double dt_scan) {
  if (!(dt_scan > 0.0)) throw Error("linf_norm: dt_scan must be > 0");
  double best = 0.0;
  for (double t = t0; t <= t1 + 0.5 * dt_scan; t += dt_scan) {
    const Vec g = sigma.evaluate(t);
    best = std::max(best, std::sqrt(dot(g, g)));
  }
  return best;
}

}  // namespace attractor

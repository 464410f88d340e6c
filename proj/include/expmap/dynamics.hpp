#pragma once

// Core dynamics of the exponential family E_kappa(z) = e^z + kappa.
//
// The parameter kappa is also the singular value: every orbit of interest
// starts there. Real parts drive everything numerically; e^z overflows a
// double once Re z > ~709, so iteration short-circuits to Escaping at
// overflow_re and classification treats that as a definitive exit.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "common.hpp"
#include "config.hpp"

namespace expmap {

inline Complex eval_map(const Complex& kappa, const Complex& z) {
  // Overflow is allowed to produce inf components rather than trap; callers
  // on the hot path use eval_map_checked.
  return std::exp(z) + kappa;
}

struct EvalResult {
  Complex value;
  bool overflowed = false;  // Re z beyond the exp range; value left at z
};

inline EvalResult eval_map_checked(const Complex& kappa, const Complex& z,
                                   const Config& cfg = {}) {
  if (z.real() > cfg.overflow_re) return {z, true};
  return {std::exp(z) + kappa, false};
}

// First `count` orbit points z0, E(z0), E(E(z0)), ...; truncated early if
// the next step would overflow.
inline std::vector<Complex> orbit(const Complex& kappa, const Complex& z0,
                                  int count, const Config& cfg = {}) {
  require(count >= 0, "orbit: count must be nonnegative");
  require(is_finite(kappa) && is_finite(z0), "orbit: arguments must be finite");
  std::vector<Complex> out;
  out.reserve(count);
  Complex z = z0;
  for (int i = 0; i < count; ++i) {
    out.push_back(z);
    auto next = eval_map_checked(kappa, z, cfg);
    if (next.overflowed || !is_finite(next.value)) break;
    z = next.value;
  }
  return out;
}

// ---- model map F(t) = e^t - 1 on the real line ----

struct FIterateResult {
  double value = 0.0;              // F^n(t), or the last finite iterate
  std::optional<int> overflow_step;  // step at which e^t left double range
};

inline FIterateResult f_iterate(double t, int n) {
  require(n >= 0, "f_iterate: n must be nonnegative");
  double v = t;
  for (int j = 0; j < n; ++j) {
    if (v > 709.0) return {v, j};
    v = std::expm1(v);
  }
  return {v, std::nullopt};
}

// ---- periodic orbits ----

struct PeriodicOrbit {
  int period = 0;
  std::vector<Complex> points;  // z_0 .. z_{n-1}
  Complex multiplier;           // product of e^{z_j} over the cycle
};

enum class SolveStatus {
  Ok,
  NoConvergence,
  DegenerateDerivative,  // |d/dz E^n - 1| below tolerance (parabolic zone)
  SingularJacobian,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "Ok";
    case SolveStatus::NoConvergence: return "NoConvergence";
    case SolveStatus::DegenerateDerivative: return "DegenerateDerivative";
    case SolveStatus::SingularJacobian: return "SingularJacobian";
  }
  return "?";
}

struct PeriodicOrbitResult {
  SolveStatus status = SolveStatus::NoConvergence;
  PeriodicOrbit orbit;      // best iterate seen, valid whenever finite
  double residual = 0.0;    // |E^n(z) - z| at that iterate
  bool ok() const { return status == SolveStatus::Ok; }
};

namespace detail {

struct ForwardPass {
  std::vector<Complex> points;
  Complex end;         // z_n
  Complex deriv;       // prod e^{z_j} = d/dz E^n
  bool valid = false;
};

inline ForwardPass forward_orbit(const Complex& kappa, int n, Complex z,
                                 double overflow_re) {
  ForwardPass fp;
  fp.points.resize(n);
  Complex a = 1.0;
  for (int j = 0; j < n; ++j) {
    fp.points[j] = z;
    if (z.real() > overflow_re || !is_finite(z)) return fp;
    Complex e = std::exp(z);
    a *= e;
    z = e + kappa;
  }
  if (!is_finite(z) || !is_finite(a)) return fp;
  fp.end = z;
  fp.deriv = a;
  fp.valid = true;
  return fp;
}

}  // namespace detail

// Newton's method on E^n(z) - z. The derivative of the iterate is the
// multiplier-in-progress prod e^{z_j}; when it is within degenerate_tol of 1
// the root is (numerically) parabolic and the method reports that instead of
// dividing by noise. The best orbit found so far is returned either way.
inline PeriodicOrbitResult find_periodic_orbit(const Complex& kappa, int n,
                                               const Complex& seed,
                                               const Config& cfg = {}) {
  require(n >= 1, "find_periodic_orbit: period must be >= 1");
  require(is_finite(kappa) && is_finite(seed),
          "find_periodic_orbit: arguments must be finite");
  PeriodicOrbitResult res;
  Complex z = seed;
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    auto fp = detail::forward_orbit(kappa, n, z, cfg.overflow_re);
    if (!fp.valid) return res;  // NoConvergence, orbit left from last pass
    Complex g = fp.end - z;
    res.orbit = {n, fp.points, fp.deriv};
    res.residual = mag(g);
    Complex dg = fp.deriv - 1.0;
    if (mag(dg) < cfg.degenerate_tol) {
      res.status = SolveStatus::DegenerateDerivative;
      return res;
    }
    Complex step = g / dg;
    z -= step;
    if (!is_finite(z)) return res;
    if (mag(step) < cfg.newton_step_tol * (1.0 + mag(z))) {
      auto final = detail::forward_orbit(kappa, n, z, cfg.overflow_re);
      if (!final.valid) return res;
      res.orbit = {n, final.points, final.deriv};
      res.residual = mag(final.end - z);
      res.status = SolveStatus::Ok;
      return res;
    }
  }
  return res;
}

// ---- classification of the singular orbit ----

struct Escaping {
  int steps = 0;
  std::vector<long long> address_prefix;  // strip indices, reliable part only
  double potential_estimate = 0.0;
};

struct Attracting {
  int period = 0;
  Complex multiplier;
  Complex orbit_point;
};

struct Indifferent {
  int period = 0;
  Complex multiplier;
};

struct Undetermined {
  int steps = 0;
};

using OrbitClassification =
    std::variant<Escaping, Attracting, Indifferent, Undetermined>;

inline const char* classification_name(const OrbitClassification& c) {
  struct V {
    const char* operator()(const Escaping&) const { return "Escaping"; }
    const char* operator()(const Attracting&) const { return "Attracting"; }
    const char* operator()(const Indifferent&) const { return "Indifferent"; }
    const char* operator()(const Undetermined&) const { return "Undetermined"; }
  };
  return std::visit(V{}, c);
}

namespace detail {

// Potential of an escaping iterate: pull the real part back through
// F^{-1}(u) = log(1+u) once per completed step.
inline double escape_potential(double u, int steps) {
  double t = u;
  for (int j = 0; j < steps && t > -1.0; ++j) t = std::log1p(t);
  return t;
}

// Reduce a refined period-n orbit to its minimal period if the points
// repeat, re-solving at the shorter period for a clean multiplier.
inline PeriodicOrbitResult minimal_period(const Complex& kappa,
                                          const PeriodicOrbitResult& full,
                                          const Config& cfg) {
  int n = full.orbit.period;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool repeats = true;
    for (int i = 0; i + d < n && repeats; ++i) {
      if (mag(full.orbit.points[i + d] - full.orbit.points[i]) > 1e-6)
        repeats = false;
    }
    if (repeats) {
      auto reduced = find_periodic_orbit(kappa, d, full.orbit.points[0], cfg);
      if ((reduced.ok() ||
           reduced.status == SolveStatus::DegenerateDerivative) &&
          reduced.residual < 1e-8)
        return reduced;
    }
  }
  return full;
}

}  // namespace detail

// Iterate the singular value kappa and decide its fate. Escape is declared
// after escape_consecutive growing steps past escape_radius (or instantly on
// exp overflow); cycles are caught with a Brent-style power-of-two anchor at
// proximity cycle_tol and then polished by Newton. Strip indices for the
// address prefix are recorded only while the accumulated error amplification
// (each step multiplies imaginary-part error by e^{Re z}) stays under
// prefix_error_budget in log scale; beyond that the entries would be noise.
inline OrbitClassification classify_singular_orbit(const Complex& kappa,
                                                   const Config& cfg = {}) {
  require(is_finite(kappa), "classify_singular_orbit: kappa must be finite");
  Complex z = kappa;
  std::vector<long long> prefix;
  double amplification = 0.0;
  bool prefix_open = true;
  int streak = 0;
  double prev_re = 0.0;

  Complex anchor = z;
  int steps_past_anchor = 0;
  int anchor_window = 1;
  int cooldown = 0;

  for (int step = 0;; ++step) {
    if (prefix_open) {
      if (std::abs(z.imag()) <= cfg.im_cap &&
          amplification <= cfg.prefix_error_budget) {
        prefix.push_back(std::llround(z.imag() / kTwoPi));
        amplification += std::max(z.real(), 0.0);
      } else {
        prefix_open = false;
      }
    }

    if (z.real() > cfg.overflow_re)
      return Escaping{step, prefix, detail::escape_potential(z.real(), step)};
    if (step >= cfg.max_iter) return Undetermined{step};

    if (steps_past_anchor > 0 && cooldown == 0 &&
        mag(z - anchor) < cfg.cycle_tol) {
      auto refined = find_periodic_orbit(kappa, steps_past_anchor, z, cfg);
      if ((refined.ok() ||
           refined.status == SolveStatus::DegenerateDerivative) &&
          refined.residual < 1e-8) {
        refined = detail::minimal_period(kappa, refined, cfg);
        double m = mag(refined.orbit.multiplier);
        if (m < 1.0 - cfg.classify_tol)
          return Attracting{refined.orbit.period, refined.orbit.multiplier,
                            refined.orbit.points[0]};
        if (std::abs(m - 1.0) <= cfg.classify_tol)
          return Indifferent{refined.orbit.period, refined.orbit.multiplier};
      }
      cooldown = anchor_window;  // refinement failed; let the orbit move on
    }
    if (cooldown > 0) --cooldown;

    if (steps_past_anchor >= anchor_window) {
      anchor = z;
      steps_past_anchor = 0;
      anchor_window *= 2;
    }

    Complex next = std::exp(z) + kappa;
    if (!is_finite(next))
      return Escaping{step + 1, prefix,
                      detail::escape_potential(z.real(), step)};
    if (next.real() > cfg.escape_radius &&
        (streak == 0 || next.real() > prev_re)) {
      prev_re = next.real();
      if (++streak >= cfg.escape_consecutive)
        return Escaping{step + 1, prefix,
                        detail::escape_potential(next.real(), step + 1)};
    } else {
      streak = 0;
    }
    z = next;
    ++steps_past_anchor;
  }
}

}  // namespace expmap

#pragma once

// Closed forms used only to verify the numerical machinery, never inside it.
//
// The period-1 hyperbolic components admit exact formulas: a fixed point z
// with multiplier mu = e^z satisfies kappa = z - e^z, so with z = w + 2pi*i*k
// and mu = e^w (Re w < 0) the k-th component is parametrized by
//
//   kappa(w) = w + 2pi*i*k - e^w,
//
// its boundary by kappa(i*theta) and its internal rays by horizontal lines.

#include <cmath>
#include <complex>
#include <optional>

#include "common.hpp"

namespace expmap::reference {

inline Complex period1_fixed_point(const Complex& w, int branch) {
  return w + Complex(0.0, kTwoPi * branch);
}

inline Complex period1_kappa(const Complex& w, int branch) {
  return period1_fixed_point(w, branch) - std::exp(w);
}

inline Complex period1_boundary(double theta, int branch) {
  return period1_kappa(Complex(0.0, theta), branch);
}

// The unique solution of e^z = z in the strip 0 < Im z < 2pi
// (fixed point of E_0 with multiplier equal to itself).
inline Complex ez_fixed_point() {
  return Complex(0.31813150520476413531, 1.33723570143068940890);
}

// Real fixed point x with e^x + kappa = x for real kappa <= -1, found by
// bisection; the attracting one (x < 0) exists exactly in that range.
inline std::optional<double> real_attracting_fixed_point(double kappa) {
  if (kappa > -1.0) return std::nullopt;
  double lo = kappa, hi = 0.0;  // f(x) = e^x + kappa - x; f(lo)>..., f(0)=1+kappa<=0
  auto f = [&](double x) { return std::exp(x) + kappa - x; };
  if (f(lo) > 0.0 && f(hi) > 0.0) return std::nullopt;
  if (f(lo) < 0.0) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Membership test for the k-th period-1 component: invert w - e^w = kappa -
// 2pi*i*k by Newton and accept when the solution lies in the left half plane.
inline bool in_period1_component(const Complex& kappa, int branch) {
  Complex target = kappa - Complex(0.0, kTwoPi * branch);
  Complex w = target;  // for Re w << 0 the e^w term is a perturbation
  for (int i = 0; i < 80; ++i) {
    Complex f = w - std::exp(w) - target;
    Complex df = 1.0 - std::exp(w);
    if (mag(df) < 1e-14) return false;
    Complex step = f / df;
    w -= step;
    if (mag(step) < 1e-13 * (1.0 + mag(w))) {
      return w.real() < 0.0 && mag(w - std::exp(w) - target) < 1e-9;
    }
  }
  return false;
}

}  // namespace expmap::reference

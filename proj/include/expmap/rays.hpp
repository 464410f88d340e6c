#pragma once

// Parameter rays G_s(t). A ray point at potential t is the solution of the
// fixed-point equation kappa = w0(kappa) where w0 is produced by backwards
// iteration: start at w_N = F^N(t) + 2pi*i*s_{N+1} far out in the dynamical
// plane and pull back through w_{j-1} = Log(w_j - kappa) + 2pi*i*s_j with
// the principal branch. The depth N is the smallest one that puts F^N(t)
// beyond the escape radius.
//
// The defect g(kappa) = w0(kappa) - kappa contracts like e^{-t} per plain
// fixed-point sweep, which stalls near t ~ 0; the solver therefore runs
// secant acceleration on g and falls back to damped fixed-point steps
// whenever the accelerated step fails to improve the residual.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "address.hpp"
#include "common.hpp"
#include "config.hpp"
#include "dynamics.hpp"

namespace expmap {

enum class RayStatus {
  Ok,
  BranchCollision,        // a pullback argument fell on the cut (-inf, 0]
  DepthOverflow,          // F^N(t) left the double range before depth N
  ContinuationBreakdown,  // tracing could not advance even after refinement
  NoConvergence,
  Unresolved,             // vertical order: two rays within error bars
};

inline const char* to_string(RayStatus s) {
  switch (s) {
    case RayStatus::Ok: return "Ok";
    case RayStatus::BranchCollision: return "BranchCollision";
    case RayStatus::DepthOverflow: return "DepthOverflow";
    case RayStatus::ContinuationBreakdown: return "ContinuationBreakdown";
    case RayStatus::NoConvergence: return "NoConvergence";
    case RayStatus::Unresolved: return "Unresolved";
  }
  return "?";
}

// smallest N with F^N(t) beyond the escape radius, capped
inline int ray_depth(double t, const Config& cfg = {}) {
  double v = t;
  for (int n = 0; n < cfg.depth_cap; ++n) {
    if (v > cfg.depth_escape) return n;
    v = std::expm1(v);
  }
  return cfg.depth_cap;
}

struct RayPointEval {
  RayStatus status = RayStatus::Ok;
  Complex w0;
  int index = -1;  // pullback level of a branch collision / overflow step
};

inline RayPointEval dynamic_ray_point(const Complex& kappa,
                                      const ExternalAddress& s, double t,
                                      int depth, const Config& cfg = {}) {
  require(t > 0.0, "dynamic_ray_point: potential must be positive");
  require(depth >= 0, "dynamic_ray_point: depth must be nonnegative");
  auto fit = f_iterate(t, depth);
  if (fit.overflow_step)
    return {RayStatus::DepthOverflow, Complex(0, 0), *fit.overflow_step};
  Complex w(fit.value, kTwoPi * (double)s.entry(depth));
  for (int j = depth; j >= 1; --j) {
    Complex arg = w - kappa;
    if (arg.real() <= 0.0 && std::abs(arg.imag()) < cfg.branch_cut_tol)
      return {RayStatus::BranchCollision, w, j};
    w = std::log(arg) + Complex(0.0, kTwoPi * (double)s.entry(j - 1));
  }
  return {RayStatus::Ok, w, -1};
}

struct RaySolve {
  RayStatus status = RayStatus::NoConvergence;
  Complex kappa;
  double residual = std::numeric_limits<double>::infinity();
  int depth = 0;
};

// solve kappa = w0(kappa) at fixed t from a seed
inline RaySolve solve_ray_point(const ExternalAddress& s, double t,
                                const Complex& seed, const Config& cfg = {}) {
  int depth = ray_depth(t, cfg);
  RaySolve out;
  out.depth = depth;

  auto defect = [&](const Complex& k) {
    auto ev = dynamic_ray_point(k, s, t, depth, cfg);
    return std::pair<RayStatus, Complex>(ev.status, ev.w0 - k);
  };

  Complex k_prev = seed;
  auto [st0, g_prev] = defect(k_prev);
  if (st0 != RayStatus::Ok) {
    out.status = st0;
    out.kappa = seed;
    return out;
  }
  Complex best_k = k_prev, best_g = g_prev;
  double best_r = mag(g_prev);
  if (best_r < cfg.fp_tol) return {RayStatus::Ok, k_prev, best_r, depth};

  double alpha = 1.0;
  Complex k_cur = k_prev + g_prev;  // full fixed-point step
  for (int it = 0; it < cfg.fp_max_iter; ++it) {
    auto [st, g_cur] = defect(k_cur);
    bool improved = st == RayStatus::Ok && mag(g_cur) < best_r;
    if (st == RayStatus::Ok && mag(g_cur) < cfg.fp_tol)
      return {RayStatus::Ok, k_cur, mag(g_cur), depth};
    if (improved) {
      // secant step on the defect using the two latest good points
      Complex denom = g_cur - g_prev;
      Complex k_next;
      if (mag(denom) > 1e-15 * (mag(g_cur) + mag(g_prev)))
        k_next = k_cur - g_cur * (k_cur - k_prev) / denom;
      else
        k_next = k_cur + alpha * g_cur;
      k_prev = k_cur;
      g_prev = g_cur;
      best_k = k_cur;
      best_g = g_cur;
      best_r = mag(g_cur);
      k_cur = k_next;
      alpha = std::min(1.0, alpha * 2.0);
    } else {
      // damped fixed-point retreat from the best point seen
      alpha *= 0.5;
      if (alpha < 1e-8) break;
      k_prev = best_k;
      g_prev = best_g;
      k_cur = best_k + alpha * best_g;
    }
  }
  out.kappa = best_k;
  out.residual = best_r;
  return out;
}

struct RayPoint {
  double t = 0.0;
  Complex kappa;
  double residual = 0.0;
  int depth = 0;
};

struct LandingEstimate {
  Complex kappa;
  double error_bar = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct ParameterRay {
  ExternalAddress address;
  std::vector<RayPoint> samples;  // strictly decreasing t
  RayStatus status = RayStatus::Ok;
  std::optional<LandingEstimate> landing;
};

inline Complex asymptotic_seed(const ExternalAddress& s, double t) {
  return Complex(t, kTwoPi * (double)s.entry(0));
}

inline ParameterRay trace_parameter_ray(const ExternalAddress& s, double t_max,
                                        double t_min, const Config& cfg = {}) {
  require(t_max > t_min && t_min > 0.0,
          "trace_parameter_ray: need tMax > tMin > 0");
  ParameterRay ray;
  ray.address = s;

  RaySolve first = solve_ray_point(s, t_max, asymptotic_seed(s, t_max), cfg);
  if (first.status != RayStatus::Ok) {
    ray.status = first.status;
    return ray;
  }
  ray.samples.push_back({t_max, first.kappa, first.residual, first.depth});

  double factor = cfg.grid_factor;
  // the seed basin of the backwards evaluation shrinks rapidly as the
  // ray approaches its landing, so refinement may go quite deep
  const double factor_floor = std::pow(cfg.grid_factor, 1.0 / 64.0);
  int successes = 0;
  double t = t_max;
  while (t > t_min * 1.0000001) {
    double t_next = t / factor;
    if (t_next < t_min * 1.0000001) t_next = t_min;
    const RayPoint& prev = ray.samples.back();
    Complex seed = prev.kappa;
    if (ray.samples.size() >= 2) {
      // linear prediction keeps the seed inside the shrinking basin
      const RayPoint& prev2 = ray.samples[ray.samples.size() - 2];
      seed += (prev.kappa - prev2.kappa) * ((prev.t - t_next) /
                                            (prev2.t - prev.t));
    }
    RaySolve sol = solve_ray_point(s, t_next, seed, cfg);

    bool ok = sol.status == RayStatus::Ok;
    if (ok && ray.samples.size() >= 2) {
      // reject jumps an order beyond the local spacing: the continuation
      // lost its ray
      const RayPoint& prev2 = ray.samples[ray.samples.size() - 2];
      double slope = mag(prev.kappa - prev2.kappa) / (prev2.t - prev.t);
      double allowed = cfg.breakdown_step_factor * (t - t_next) *
                       std::max(1.0, slope);
      if (mag(sol.kappa - prev.kappa) > allowed) ok = false;
    }

    if (ok) {
      ray.samples.push_back({t_next, sol.kappa, sol.residual, sol.depth});
      t = t_next;
      if (++successes >= 4) {
        factor = cfg.grid_factor;  // restore the coarse grid
        successes = 0;
      }
    } else {
      successes = 0;
      factor = std::sqrt(factor);  // refine the step and retry
      if (factor < factor_floor) {
        ray.status = sol.status == RayStatus::Ok
                         ? RayStatus::ContinuationBreakdown
                         : sol.status;
        return ray;
      }
    }
  }
  return ray;
}

namespace detail {

// polynomial extrapolation to t = 0 (Neville's scheme)
inline Complex neville_at_zero(const std::vector<double>& x,
                               std::vector<Complex> y) {
  size_t n = x.size();
  for (size_t level = 1; level < n; ++level)
    for (size_t i = 0; i + level < n; ++i)
      y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
  return y[0];
}

inline double spread_of(const std::vector<Complex>& ex) {
  double s = 0.0;
  size_t first = ex.size() > 3 ? ex.size() - 3 : 0;
  for (size_t a = first; a < ex.size(); ++a)
    for (size_t b = a + 1; b < ex.size(); ++b)
      s = std::max(s, mag(ex[a] - ex[b]));
  return s;
}

// Aitken delta-squared cascade on a geometrically resampled tail. This is
// the Richardson scheme for an approach c * t^alpha with alpha unknown,
// which covers parabolic landings where the approach is not analytic in t.
inline std::vector<Complex> aitken_extrapolants(const ParameterRay& ray) {
  // stay close to the landing: far samples obey different asymptotics
  const double rho = 1.35;
  const double t_cap = 8.0 * ray.samples.back().t;
  std::vector<Complex> pts;
  size_t i = ray.samples.size();
  double target = ray.samples.back().t;
  while (i > 0 && pts.size() < 7 && target <= t_cap) {
    size_t best = i - 1;
    double err = std::abs(std::log(ray.samples[best].t / target));
    for (size_t j = i - 1; j-- > 0;) {
      double e = std::abs(std::log(ray.samples[j].t / target));
      if (e < err) {
        err = e;
        best = j;
      }
    }
    pts.push_back(ray.samples[best].kappa);
    i = best;
    target *= rho;
  }
  // pts runs from the deepest sample outward
  std::vector<Complex> chain;
  if (pts.empty()) return chain;
  chain.push_back(pts.front());
  while (pts.size() >= 3) {
    std::vector<Complex> next;
    for (size_t j = 0; j + 2 < pts.size(); ++j) {
      Complex d1 = pts[j + 1] - pts[j];
      Complex d2 = pts[j + 2] - 2.0 * pts[j + 1] + pts[j];
      next.push_back(mag(d2) > 1e-14 * (mag(pts[j]) + 1.0)
                         ? pts[j] - d1 * d1 / d2
                         : pts[j]);
    }
    chain.push_back(next.front());
    pts = std::move(next);
  }
  return chain;
}

// Parabolic landings of periodic rays approach like t*(a*log t + b); fit
// that model by least squares over a few window sizes. Polynomial schemes
// diverge on such tails, while this fit is poor on analytic ones, so the
// caller picks the scheme with the smallest spread.
inline std::vector<Complex> logfit_extrapolants(const ParameterRay& ray) {
  std::vector<Complex> out;
  size_t m = ray.samples.size();
  for (size_t win : {10, 14, 18}) {
    if (win > m) break;
    double A[3][3] = {};
    Complex b[3] = {};
    for (size_t i = m - win; i < m; ++i) {
      double t = ray.samples[i].t;
      double phi[3] = {1.0, t * std::log(t), t};
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) A[r][c] += phi[r] * phi[c];
        b[r] += phi[r] * ray.samples[i].kappa;
      }
    }
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(A[idx[r]][col]) > std::abs(A[idx[piv]][col])) piv = r;
      std::swap(idx[col], idx[piv]);
      if (A[idx[col]][col] == 0.0) return out;
      for (int r = col + 1; r < 3; ++r) {
        double f = A[idx[r]][col] / A[idx[col]][col];
        for (int c = col; c < 3; ++c) A[idx[r]][c] -= f * A[idx[col]][c];
        b[idx[r]] -= f * b[idx[col]];
      }
    }
    Complex x[3];
    for (int r = 2; r >= 0; --r) {
      Complex acc = b[idx[r]];
      for (int c = r + 1; c < 3; ++c) acc -= A[idx[r]][c] * x[c];
      x[r] = acc / A[idx[r]][r];
    }
    out.push_back(x[0]);
  }
  return out;
}

}  // namespace detail

inline LandingEstimate estimate_landing(const ParameterRay& ray,
                                        const Config& cfg = {}) {
  LandingEstimate out;
  size_t m = ray.samples.size();
  if (m < 6) return out;  // not enough tail to extrapolate

  std::vector<Complex> poly;
  for (int k = 0; k < 3; ++k) {
    size_t window = std::min<size_t>(cfg.landing_samples - k, m);
    std::vector<double> xs;
    std::vector<Complex> ys;
    for (size_t i = m - window; i < m; ++i) {
      xs.push_back(ray.samples[i].t);
      ys.push_back(ray.samples[i].kappa);
    }
    poly.push_back(detail::neville_at_zero(xs, ys));
  }
  out.kappa = poly.front();
  out.error_bar = detail::spread_of(poly);

  auto chain = detail::aitken_extrapolants(ray);
  if (chain.size() >= 3) {
    double bar = detail::spread_of(chain);
    if (bar < out.error_bar) {
      out.kappa = chain.back();
      out.error_bar = bar;
    }
  }
  auto logfit = detail::logfit_extrapolants(ray);
  if (logfit.size() >= 3) {
    double bar = detail::spread_of(logfit);
    if (bar < out.error_bar) {
      out.kappa = logfit.front();  // tightest window
      out.error_bar = bar;
    }
  }
  out.converged =
      out.error_bar <= cfg.landing_spread_max && ray.samples.back().t <= 0.05;
  return out;
}

struct AsymptoticError {
  RayStatus status = RayStatus::NoConvergence;
  double error = std::numeric_limits<double>::infinity();
};

// |G_s(t) - t - 2pi*i*s_1|, the defect against the first-order asymptotics
inline AsymptoticError ray_asymptotic_error(const ExternalAddress& s, double t,
                                            const Config& cfg = {}) {
  RaySolve sol = solve_ray_point(s, t, asymptotic_seed(s, t), cfg);
  if (sol.status != RayStatus::Ok) return {sol.status, 0.0};
  return {RayStatus::Ok, mag(sol.kappa - asymptotic_seed(s, t))};
}

struct VerticalOrder {
  RayStatus status = RayStatus::Ok;
  std::vector<int> order;  // input indices sorted bottom to top by Im
  std::optional<std::pair<int, int>> clash;  // set when Unresolved
};

inline VerticalOrder vertical_order(const std::vector<ExternalAddress>& addrs,
                                    double t, const Config& cfg = {}) {
  VerticalOrder out;
  std::vector<RaySolve> sols;
  for (const auto& s : addrs) {
    RaySolve sol = solve_ray_point(s, t, asymptotic_seed(s, t), cfg);
    if (sol.status != RayStatus::Ok) {
      out.status = sol.status;
      return out;
    }
    sols.push_back(sol);
  }
  out.order.resize(addrs.size());
  for (size_t i = 0; i < addrs.size(); ++i) out.order[(size_t)i] = (int)i;
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    return sols[a].kappa.imag() < sols[b].kappa.imag();
  });
  for (size_t r = 0; r + 1 < out.order.size(); ++r) {
    int a = out.order[r], b = out.order[r + 1];
    double gap = sols[b].kappa.imag() - sols[a].kappa.imag();
    if (gap <= 10.0 * (sols[a].residual + sols[b].residual)) {
      out.status = RayStatus::Unresolved;
      out.clash = std::make_pair(a, b);
      return out;
    }
  }
  return out;
}

}  // namespace expmap

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "address.hpp"
#include "common.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "rays.hpp"

// Hyperbolic components of the parameter plane. Each component W of period n
// carries a conformal coordinate w = log(multiplier) mapping W onto the left
// half plane; everything here is continuation of the two-variable system
//
//   E^n(z) - z = 0,   prod_j e^{z_j} - mu = 0
//
// in (kappa, z) with mu prescribed, starting from a known seed inside W.

namespace expmap {

enum class CompStatus {
  Ok,
  NoConvergence,
  SingularJacobian,
  ContinuationBreakdown,
  DivergedToInfinity,
};

inline const char* to_string(CompStatus s) {
  switch (s) {
    case CompStatus::Ok: return "Ok";
    case CompStatus::NoConvergence: return "NoConvergence";
    case CompStatus::SingularJacobian: return "SingularJacobian";
    case CompStatus::ContinuationBreakdown: return "ContinuationBreakdown";
    case CompStatus::DivergedToInfinity: return "DivergedToInfinity";
  }
  return "?";
}

struct ComponentSeed {
  Complex kappa;
  Complex z;   // one point of the attracting cycle
  Complex mu;  // its multiplier
};

struct HyperbolicComponent {
  int period = 1;
  ComponentSeed seed;
  long long branch_tag = 0;  // which preimage sheet the seed normalizes
  std::optional<IntermediateAddress> address;
  bool address_empirical = false;
};

// The period-1 components admit closed forms: on branch k the parabolic
// root is kappa = 2 pi i k - 1 and the point of multiplier e^w is
// kappa(w) = w + 2 pi i k - e^w with fixed point z = w + 2 pi i k.
inline HyperbolicComponent period1_component(long long k,
                                             const Config& cfg = {}) {
  Complex kappa(-1.0 - std::exp(-1.0), kTwoPi * (double)k);
  Complex z(-1.0, kTwoPi * (double)k);
  HyperbolicComponent w;
  w.period = 1;
  w.branch_tag = k;
  auto orb = find_periodic_orbit(kappa, 1, z, cfg);
  if (orb.ok()) {
    w.seed = {kappa, orb.orbit.points[0], orb.orbit.multiplier};
  } else {
    w.seed = {kappa, z, Complex(std::exp(-1.0), 0.0)};
  }
  return w;
}

// ---- Newton solve at prescribed multiplier ----

struct MultiplierSolve {
  CompStatus status = CompStatus::NoConvergence;
  Complex kappa;
  Complex z;
  Complex multiplier;  // measured prod e^{z_j} at the solution
  double residual = 0.0;
  bool ok() const { return status == CompStatus::Ok; }
};

namespace detail {

struct MultPass {
  bool valid = false;
  Complex end;    // z_n
  Complex a_end;  // A_n = prod e^{z_j}
  Complex b_end;  // B_n = d z_n / d kappa
  Complex sum_a;  // sum_{j<n} A_j
  Complex sum_b;  // sum_{j<n} B_j
};

inline MultPass multiplier_pass(const Complex& kappa, int n, Complex z,
                                double overflow_re) {
  MultPass p;
  Complex a(1.0, 0.0), b(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    if (z.real() > overflow_re || !is_finite(z)) return p;
    p.sum_a += a;
    p.sum_b += b;
    Complex e = std::exp(z);
    a = e * a;
    b = e * b + 1.0;
    z = e + kappa;
  }
  if (!is_finite(z) || !is_finite(a) || !is_finite(b)) return p;
  p.end = z;
  p.a_end = a;
  p.b_end = b;
  p.valid = true;
  return p;
}

}  // namespace detail

// Two-dimensional Newton iteration on (closure, multiplier) with unknowns
// (z_0, kappa). The Jacobian is assembled from the variations A_j (in z_0)
// and B_j (in kappa) of the orbit points; its second row uses that the
// multiplier is exp(sum z_j).
inline MultiplierSolve solve_for_multiplier(int n, const Complex& mu,
                                            const Complex& kappa_seed,
                                            const Complex& z_seed,
                                            const Config& cfg = {}) {
  require(n >= 1, "solve_for_multiplier: period must be >= 1");
  require(mag(mu) > 0.0, "solve_for_multiplier: multiplier cannot vanish");
  MultiplierSolve out;
  Complex kappa = kappa_seed, z = z_seed;
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    auto p = detail::multiplier_pass(kappa, n, z, cfg.overflow_re);
    if (!p.valid) return out;
    Complex g1 = p.end - z;
    Complex g2 = p.a_end - mu;
    out.kappa = kappa;
    out.z = z;
    out.multiplier = p.a_end;
    out.residual = mag(g1) + mag(g2);
    Complex a = p.a_end - 1.0;
    Complex b = p.b_end;
    Complex c = p.a_end * p.sum_a;
    Complex d = p.a_end * p.sum_b;
    Complex det = a * d - b * c;
    if (mag(det) < 1e-13 * (mag(a * d) + mag(b * c) + 1e-300)) {
      out.status = CompStatus::SingularJacobian;
      return out;
    }
    Complex dz = (-g1 * d + g2 * b) / det;
    Complex dk = (-g2 * a + g1 * c) / det;
    z += dz;
    kappa += dk;
    if (!is_finite(z) || !is_finite(kappa)) return out;
    if (mag(dz) + mag(dk) <
        cfg.newton_step_tol * (1.0 + mag(z) + mag(kappa))) {
      auto fin = detail::multiplier_pass(kappa, n, z, cfg.overflow_re);
      if (!fin.valid) return out;
      out.kappa = kappa;
      out.z = z;
      out.multiplier = fin.a_end;
      out.residual = mag(fin.end - z) + mag(fin.a_end - mu);
      if (out.residual < 1e-6 * (1.0 + mag(mu))) out.status = CompStatus::Ok;
      return out;
    }
  }
  return out;
}

// ---- continuation along a path of multipliers ----

namespace detail {

struct ContState {
  Complex kappa;
  Complex z;
  Complex mu_measured;
};

// Walk the straight segment from w_from to w_to in log-multiplier space,
// re-solving at mu = e^w each step. Step length adapts: halve on failure,
// recover toward cont_step on success.
inline CompStatus continue_along_w(int n, ContState& st, const Complex& w_from,
                                   const Complex& w_to, const Config& cfg) {
  Complex dw = w_to - w_from;
  double len = mag(dw);
  if (len == 0.0) return CompStatus::Ok;
  double base = std::min(1.0, cfg.cont_step / len);
  double dtau = base, tau = 0.0;
  int evals = 0;
  while (tau < 1.0 - 1e-15) {
    double next = std::min(1.0, tau + dtau);
    Complex mu = std::exp(w_from + dw * next);
    auto sol = solve_for_multiplier(n, mu, st.kappa, st.z, cfg);
    if (++evals > cfg.cont_max_steps) return CompStatus::ContinuationBreakdown;
    if (sol.ok()) {
      st = {sol.kappa, sol.z, sol.multiplier};
      tau = next;
      dtau = std::min(base, dtau * 2.0);
      if (mag(st.kappa) > cfg.diverged_kappa)
        return CompStatus::DivergedToInfinity;
    } else {
      dtau *= 0.5;
      if (dtau < base / 1024.0) return CompStatus::ContinuationBreakdown;
    }
  }
  return CompStatus::Ok;
}

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

// ---- conformal coordinate ----

struct PhiInverse {
  CompStatus status = CompStatus::NoConvergence;
  Complex kappa;
  Complex z;
  Complex mu;  // measured multiplier at the returned parameter
};

// Parameter of internal coordinate w (Re w < 0), reached by continuation
// from the seed's own log-multiplier along the straight segment.
inline PhiInverse phi_inverse(const HyperbolicComponent& w_comp,
                              const Complex& w, const Config& cfg = {}) {
  require(w.real() < 0.0, "phi_inverse: w must lie in the left half plane");
  require(is_finite(w), "phi_inverse: w must be finite");
  detail::ContState st{w_comp.seed.kappa, w_comp.seed.z, w_comp.seed.mu};
  Complex w0 = std::log(w_comp.seed.mu);
  auto status = detail::continue_along_w(w_comp.period, st, w0, w, cfg);
  return {status, st.kappa, st.z, st.mu_measured};
}

// ---- internal rays ----

struct InternalRaySample {
  double t = 0.0;  // internal potential, w = t + 2 pi i h
  Complex kappa;
  Complex z;
  Complex mu;  // measured multiplier
};

struct InternalRay {
  double height = 0.0;
  CompStatus status = CompStatus::Ok;
  std::vector<InternalRaySample> samples;  // t strictly increasing
};

// Trace w(t) = t + 2 pi i h from t_start up toward t_end < 0. The sample
// grid is uniform (step 1/4) until t = -1/2 and then halves toward zero, so
// the tail is geometric and fit for extrapolation onto the boundary.
inline InternalRay internal_ray(const HyperbolicComponent& w_comp, double h,
                                double t_start, double t_end,
                                const Config& cfg = {}) {
  require(t_start < t_end && t_end < 0.0,
          "internal_ray: need tStart < tEnd < 0");
  InternalRay ray;
  ray.height = h;
  const double im = kTwoPi * h;
  detail::ContState st{w_comp.seed.kappa, w_comp.seed.z, w_comp.seed.mu};
  Complex w0 = std::log(w_comp.seed.mu);
  ray.status =
      detail::continue_along_w(w_comp.period, st, w0, Complex(t_start, im), cfg);
  if (ray.status != CompStatus::Ok) return ray;
  ray.samples.push_back({t_start, st.kappa, st.z, st.mu_measured});
  double a = -t_start;
  const double a_end = -t_end;
  while (a > a_end * (1.0 + 1e-12)) {
    double a_next;
    if (a > 0.5 + 1e-12)
      a_next = std::max(a - 0.25, 0.5);
    else
      a_next = a * 0.5;
    if (a_next < a_end) a_next = a_end;
    ray.status = detail::continue_along_w(w_comp.period, st, Complex(-a, im),
                                          Complex(-a_next, im), cfg);
    if (ray.status != CompStatus::Ok) return ray;
    ray.samples.push_back({-a_next, st.kappa, st.z, st.mu_measured});
    a = a_next;
  }
  return ray;
}

struct InternalLanding {
  CompStatus status = CompStatus::NoConvergence;
  Complex kappa;       // boundary parameter, extrapolated to t = 0
  Complex z;           // orbit point carried to the boundary
  Complex multiplier;  // verified multiplier of the orbit at kappa
  double error_bar = 0.0;
  double residual = 0.0;  // closure residual of the verifying orbit
};

namespace detail {

// Neville extrapolation of complex samples to t = 0 over the last `win`
// nodes; the spread across window sizes win, win-1, win-2 is the error bar.
inline std::pair<Complex, double> extrapolate_to_zero(
    const std::vector<double>& ts, const std::vector<Complex>& ys, int win) {
  std::vector<Complex> vals;
  int m = (int)ts.size();
  for (int k = 0; k < 3 && win - k >= 2; ++k) {
    int n = std::min(m, win - k);
    std::vector<double> x(ts.end() - n, ts.end());
    std::vector<Complex> y(ys.end() - n, ys.end());
    for (int level = 1; level < n; ++level)
      for (int i = 0; i + level < n; ++i)
        y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) /
               (x[i + level] - x[i]);
    vals.push_back(y[0]);
  }
  double spread = 0.0;
  for (size_t i = 0; i < vals.size(); ++i)
    for (size_t j = i + 1; j < vals.size(); ++j)
      spread = std::max(spread, mag(vals[i] - vals[j]));
  return {vals.front(), spread};
}

}  // namespace detail

// Land the internal ray at height h on the boundary: trace to t = -rayStopT,
// extrapolate both the parameter and the orbit point to t = 0, and verify by
// solving the periodic orbit at the landing parameter. The orbit solve may
// come back degenerate right at a parabolic point; its orbit is then the
// seed itself, which is exactly the extrapolated data.
inline InternalLanding internal_ray_landing(const HyperbolicComponent& w_comp,
                                            double h, const Config& cfg = {}) {
  InternalLanding out;
  auto ray = internal_ray(w_comp, h, -1.0, -cfg.ray_stop_t, cfg);
  if (ray.status != CompStatus::Ok) {
    out.status = ray.status;
    if (!ray.samples.empty()) out.kappa = ray.samples.back().kappa;
    return out;
  }
  int m = (int)ray.samples.size();
  if (m < 6) return out;
  std::vector<double> ts;
  std::vector<Complex> ks, zs;
  for (auto& s : ray.samples) {
    ts.push_back(s.t);
    ks.push_back(s.kappa);
    zs.push_back(s.z);
  }
  int win = std::min(8, m);
  auto [kappa_star, bar] = detail::extrapolate_to_zero(ts, ks, win);
  auto [z_star, zbar] = detail::extrapolate_to_zero(ts, zs, win);
  out.kappa = kappa_star;
  out.z = z_star;
  out.error_bar = std::max(bar, zbar);
  if (mag(kappa_star) > cfg.diverged_kappa) {
    out.status = CompStatus::DivergedToInfinity;
    return out;
  }
  auto orb = find_periodic_orbit(kappa_star, w_comp.period, z_star, cfg);
  if (orb.status != SolveStatus::Ok &&
      orb.status != SolveStatus::DegenerateDerivative)
    return out;
  out.multiplier = orb.orbit.multiplier;
  out.residual = orb.residual;
  out.status = CompStatus::Ok;
  return out;
}

// ---- boundary ----

struct BoundarySample {
  double theta = 0.0;  // arg mu in [0, 2 pi)
  Complex kappa;
  Complex z;
  Complex mu;
};

struct ComponentBoundary {
  CompStatus status = CompStatus::Ok;
  std::vector<BoundarySample> samples;  // sorted by theta
  bool closed = false;
  std::vector<std::pair<double, double>> gaps;  // skipped theta intervals
};

// March mu once around the unit circle. The walk starts at the seed's own
// angle (reached radially), so it never begins on top of a degenerate root.
// Failed angles are recorded as gaps and the trace restarts from a linear
// extrapolation of the last two good samples.
inline ComponentBoundary boundary_trace(const HyperbolicComponent& w_comp,
                                        int steps, const Config& cfg = {}) {
  require(steps >= 4, "boundary_trace: need at least 4 samples");
  ComponentBoundary out;
  detail::ContState st{w_comp.seed.kappa, w_comp.seed.z, w_comp.seed.mu};
  Complex w0 = std::log(w_comp.seed.mu);
  double theta0 = w0.imag();
  out.status = detail::continue_along_w(w_comp.period, st, w0,
                                        Complex(0.0, theta0), cfg);
  if (out.status != CompStatus::Ok) return out;
  auto wrap = [](double th) {
    double r = std::fmod(th, kTwoPi);
    return r < 0 ? r + kTwoPi : r;
  };
  Complex kappa_first = st.kappa;
  out.samples.push_back({wrap(theta0), st.kappa, st.z, st.mu_measured});
  const double dth = kTwoPi / steps;
  double theta_good = theta0;  // unwrapped angle of the current state
  detail::ContState prev = st;
  double theta_prev = theta0;
  bool have_prev = false;
  int consecutive = 0;
  double gap_from = 0.0;
  bool in_gap = false;
  double step_sum = 0.0;
  int step_cnt = 0;
  for (int k = 1; k <= steps; ++k) {
    double theta = theta0 + k * dth;
    detail::ContState trial = st;
    auto s = detail::continue_along_w(w_comp.period, trial,
                                      Complex(0.0, theta_good),
                                      Complex(0.0, theta), cfg);
    if (s != CompStatus::Ok && have_prev) {
      // jump the degenerate angle: re-seed from the tangent line
      double r = (theta - theta_prev) / (theta_good - theta_prev);
      Complex kx = prev.kappa + (st.kappa - prev.kappa) * r;
      Complex zx = prev.z + (st.z - prev.z) * r;
      auto direct = solve_for_multiplier(
          w_comp.period, std::exp(Complex(0.0, theta)), kx, zx, cfg);
      if (direct.ok()) {
        trial = {direct.kappa, direct.z, direct.multiplier};
        s = CompStatus::Ok;
      }
    }
    if (s == CompStatus::Ok) {
      if (in_gap) {
        out.gaps.emplace_back(wrap(gap_from), wrap(theta));
        in_gap = false;
      }
      step_sum += mag(trial.kappa - st.kappa);
      ++step_cnt;
      prev = st;
      theta_prev = theta_good;
      have_prev = true;
      st = trial;
      theta_good = theta;
      consecutive = 0;
      if (k < steps)
        out.samples.push_back({wrap(theta), st.kappa, st.z, st.mu_measured});
    } else {
      if (!in_gap) {
        gap_from = theta;
        in_gap = true;
      }
      if (++consecutive > 40) {
        out.status = CompStatus::ContinuationBreakdown;
        return out;
      }
    }
  }
  if (in_gap) out.gaps.emplace_back(wrap(gap_from), wrap(theta0 + kTwoPi));
  double mean_step = step_cnt ? step_sum / step_cnt : 0.0;
  out.closed = mag(st.kappa - kappa_first) < std::max(10.0 * mean_step, 1e-9);
  std::sort(out.samples.begin(), out.samples.end(),
            [](const BoundarySample& a, const BoundarySample& b) {
              return a.theta < b.theta;
            });
  return out;
}

// ---- component identity ----

namespace detail {

inline bool orbits_match(const std::vector<Complex>& a,
                         const std::vector<Complex>& b, double tol) {
  if (a.size() != b.size()) return false;
  size_t n = a.size();
  for (size_t r = 0; r < n; ++r) {
    bool all = true;
    for (size_t i = 0; i < n && all; ++i)
      if (mag(a[i] - b[(i + r) % n]) > tol) all = false;
    if (all) return true;
  }
  return false;
}

// Continue the attracting orbit of seed `a` along the straight parameter
// segment to `b`. Same component iff the whole path stays attracting of the
// same period and the arriving orbit is b's orbit (up to cyclic rotation).
inline bool same_component(int n, const Complex& ka,
                           const std::vector<Complex>& orbit_a,
                           const Complex& kb,
                           const std::vector<Complex>& orbit_b,
                           const Config& cfg) {
  if (mag(ka - kb) < cfg.dedup_tol &&
      orbits_match(orbit_a, orbit_b, 1e-4)) return true;
  int steps = (int)std::ceil(mag(kb - ka) / cfg.cont_step);
  steps = std::max(steps, 1);
  if (steps > cfg.cont_max_steps) return false;
  Complex z = orbit_a.empty() ? Complex() : orbit_a[0];
  std::vector<Complex> pts;
  for (int j = 1; j <= steps; ++j) {
    Complex kappa = ka + (kb - ka) * ((double)j / steps);
    auto orb = find_periodic_orbit(kappa, n, z, cfg);
    if (!orb.ok() || orb.residual > 1e-8) return false;
    if (mag(orb.orbit.multiplier) >= 1.0) return false;
    z = orb.orbit.points[0];
    pts = orb.orbit.points;
  }
  return orbits_match(pts, orbit_b, std::max(cfg.dedup_tol, 1e-6));
}

}  // namespace detail

// ---- census ----

struct Window {
  double re_lo = 0.0, re_hi = 0.0;
  double im_lo = 0.0, im_hi = 0.0;
};

// Grid census of a parameter window: classify every node, keep attractors of
// the requested period, group adjacent hits, then merge groups that are
// connected by orbit continuation. One refined seed survives per component.
inline std::vector<HyperbolicComponent> find_components(int n,
                                                        const Window& win,
                                                        double grid_step,
                                                        const Config& cfg = {}) {
  require(n >= 1, "find_components: period must be >= 1");
  require(grid_step > 0.0, "find_components: grid step must be positive");
  require(win.re_lo < win.re_hi && win.im_lo < win.im_hi,
          "find_components: window is empty");
  Config census = cfg;
  census.max_iter = cfg.census_max_iter;
  int nx = (int)std::floor((win.re_hi - win.re_lo) / grid_step + 1e-9) + 1;
  int ny = (int)std::floor((win.im_hi - win.im_lo) / grid_step + 1e-9) + 1;
  struct Hit {
    int ix, iy;
    Complex kappa, z, mu;
  };
  std::vector<Hit> hits;
  std::unordered_map<long long, int> at;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      Complex kappa(win.re_lo + ix * grid_step, win.im_lo + iy * grid_step);
      auto cls = classify_singular_orbit(kappa, census);
      if (auto* att = std::get_if<Attracting>(&cls);
          att && att->period == n) {
        at[(long long)iy * nx + ix] = (int)hits.size();
        hits.push_back({ix, iy, kappa, att->orbit_point, att->multiplier});
      }
    }
  }
  if (hits.empty()) return {};
  detail::Dsu dsu(hits.size());
  for (size_t i = 0; i < hits.size(); ++i) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy) continue;
        auto it = at.find((long long)(hits[i].iy + dy) * nx + hits[i].ix + dx);
        if (it != at.end()) dsu.unite((int)i, it->second);
      }
    }
  }
  // deepest hit (smallest |mu|) represents each group
  std::map<int, int> rep;
  for (size_t i = 0; i < hits.size(); ++i) {
    int r = dsu.find((int)i);
    auto it = rep.find(r);
    if (it == rep.end() || mag(hits[i].mu) < mag(hits[it->second].mu))
      rep[r] = (int)i;
  }
  struct Group {
    Complex kappa;
    std::vector<Complex> orbit;
    Complex mu;
  };
  std::vector<Group> groups;
  for (auto& [root, idx] : rep) {
    auto orb = find_periodic_orbit(hits[idx].kappa, n, hits[idx].z, cfg);
    if (!orb.ok() || orb.residual > 1e-8) continue;
    if (mag(orb.orbit.multiplier) >= 1.0) continue;
    groups.push_back(
        {hits[idx].kappa, orb.orbit.points, orb.orbit.multiplier});
  }
  // adjacency can split one component across grid islands; reconnect
  detail::Dsu gd(groups.size());
  for (size_t i = 0; i < groups.size(); ++i)
    for (size_t j = i + 1; j < groups.size(); ++j)
      if (gd.find((int)i) != gd.find((int)j) &&
          detail::same_component(n, groups[i].kappa, groups[i].orbit,
                                 groups[j].kappa, groups[j].orbit, cfg))
        gd.unite((int)i, (int)j);
  std::map<int, Group*> final_rep;
  for (size_t i = 0; i < groups.size(); ++i) {
    int r = gd.find((int)i);
    auto it = final_rep.find(r);
    if (it == final_rep.end() || mag(groups[i].mu) < mag(it->second->mu))
      final_rep[r] = &groups[i];
  }
  std::vector<HyperbolicComponent> out;
  for (auto& [root, g] : final_rep) {
    HyperbolicComponent w;
    w.period = n;
    w.seed = {g->kappa, g->orbit[0], g->mu};
    out.push_back(w);
  }
  std::sort(out.begin(), out.end(),
            [](const HyperbolicComponent& a, const HyperbolicComponent& b) {
              if (a.seed.kappa.real() != b.seed.kappa.real())
                return a.seed.kappa.real() < b.seed.kappa.real();
              return a.seed.kappa.imag() < b.seed.kappa.imag();
            });
  return out;
}

// ---- bifurcation ----

struct Bifurcation {
  CompStatus status = CompStatus::NoConvergence;
  HyperbolicComponent child;
  Complex attachment;  // parabolic parameter where child meets parent
};

// Child of W at internal angle p/q: continue to the boundary point of
// multiplier e^{2 pi i p/q}, then scan a small fan of parameters just
// outside for an attracting orbit of period q*n and refine it. The angle is
// taken as a height: p is any integer coprime to q, not reduced mod q,
// since the boundary is a line and carries infinitely many such points.
inline Bifurcation bifurcation_child(const HyperbolicComponent& w_comp,
                                     long long p, long long q,
                                     const Config& cfg = {}) {
  require(q >= 2, "bifurcation_child: q must be at least 2");
  require(std::gcd(p < 0 ? -p : p, q) == 1,
          "bifurcation_child: p/q must be in lowest terms");
  Bifurcation out;
  const double im = kTwoPi * (double)p / (double)q;
  detail::ContState st{w_comp.seed.kappa, w_comp.seed.z, w_comp.seed.mu};
  Complex w0 = std::log(w_comp.seed.mu);
  auto s = detail::continue_along_w(w_comp.period, st, w0,
                                    Complex(-0.05, im), cfg);
  if (s != CompStatus::Ok) {
    out.status = s;
    return out;
  }
  Complex kappa_in = st.kappa;
  s = detail::continue_along_w(w_comp.period, st, Complex(-0.05, im),
                               Complex(0.0, im), cfg);
  if (s != CompStatus::Ok) {
    out.status = s;
    return out;
  }
  out.attachment = st.kappa;
  Complex dir = out.attachment - kappa_in;
  double dn = mag(dir);
  dir = dn > 0 ? dir / dn : Complex(1.0, 0.0);
  int child_period = w_comp.period * (int)q;
  Config census = cfg;
  census.max_iter = cfg.census_max_iter;
  for (double r : {0.01, 0.02, 0.04, 0.08, 0.15, 0.3}) {
    for (double phi : {0.0, 0.4, -0.4, 0.8, -0.8, 1.2, -1.2}) {
      Complex kc = out.attachment + r * dir * std::polar(1.0, phi);
      auto cls = classify_singular_orbit(kc, census);
      auto* att = std::get_if<Attracting>(&cls);
      if (!att || att->period != child_period) continue;
      auto orb = find_periodic_orbit(kc, child_period, att->orbit_point, cfg);
      if (!orb.ok() || mag(orb.orbit.multiplier) >= 1.0) continue;
      out.child.period = child_period;
      out.child.seed = {kc, orb.orbit.points[0], orb.orbit.multiplier};
      out.status = CompStatus::Ok;
      return out;
    }
  }
  return out;
}

// ---- bifurcation chains ----

// Partition components into classes connected by bifurcation chains of
// denominator at most max_depth. Satellites of a common parent do not touch
// each other directly, so the canonical period-1 components near the input
// set are added as internal hub nodes; they are not reported themselves.
inline std::vector<std::vector<int>> chain_connectivity(
    const std::vector<HyperbolicComponent>& comps, int max_depth,
    const Config& cfg = {}) {
  require(max_depth >= 1, "chain_connectivity: maxDepth must be >= 1");
  int m = (int)comps.size();
  std::vector<HyperbolicComponent> nodes = comps;
  std::set<long long> ks;
  for (auto& c : comps) {
    long long k0 = (long long)std::llround(c.seed.kappa.imag() / kTwoPi);
    for (long long d = -1; d <= 1; ++d)
      if (std::llabs(k0 + d) <= 4) ks.insert(k0 + d);
  }
  for (long long k : ks) nodes.push_back(period1_component(k, cfg));
  detail::Dsu dsu(nodes.size());
  std::set<int> periods;
  for (auto& nd : nodes) periods.insert(nd.period);
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (int target : periods) {
      if (target % nodes[i].period != 0) continue;
      long long q = target / nodes[i].period;
      if (q < 2 || q > max_depth) continue;
      for (long long p = -2 * q; p <= 2 * q; ++p) {
        if (std::gcd(p < 0 ? -p : p, q) != 1) continue;
        auto bif = bifurcation_child(nodes[i], p, q, cfg);
        if (bif.status != CompStatus::Ok) continue;
        auto corb = find_periodic_orbit(bif.child.seed.kappa, target,
                                        bif.child.seed.z, cfg);
        if (!corb.ok()) continue;
        for (size_t j = 0; j < nodes.size(); ++j) {
          if (j == i || nodes[j].period != target) continue;
          if (dsu.find((int)i) == dsu.find((int)j)) continue;
          auto norb = find_periodic_orbit(nodes[j].seed.kappa, target,
                                          nodes[j].seed.z, cfg);
          if (!norb.ok()) continue;
          if (detail::same_component(target, bif.child.seed.kappa,
                                     corb.orbit.points, nodes[j].seed.kappa,
                                     norb.orbit.points, cfg)) {
            dsu.unite((int)i, (int)j);
            break;
          }
        }
      }
    }
  }
  std::map<int, std::vector<int>> classes;
  for (int i = 0; i < m; ++i) classes[dsu.find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : classes) out.push_back(members);
  std::sort(out.begin(), out.end());
  return out;
}

// ---- intermediate address ----

// Read the component's address off the deep attracting orbit: far down the
// h = 0 internal ray the cycle shadows the dynamic ray tail, one entry per
// strip, with the point mapping onto the far point sitting on a strip
// boundary (half entry). The candidate is then checked against the two
// parameter rays flanking the half entry, traced to the tail's depth; the
// whole procedure is a numerical stand-in for the combinatorial definition,
// so accepted addresses are flagged empirical by the caller.
inline std::optional<IntermediateAddress> assign_intermediate_address(
    const HyperbolicComponent& w_comp, const Config& cfg = {}) {
  if (w_comp.period < 2) return std::nullopt;
  const int n = w_comp.period;
  PhiInverse deep;
  for (double t : {-12.0, -9.0, -7.0}) {
    deep = phi_inverse(w_comp, Complex(t, 0.0), cfg);
    if (deep.status == CompStatus::Ok) break;
  }
  if (deep.status != CompStatus::Ok) return std::nullopt;
  auto orb = find_periodic_orbit(deep.kappa, n, deep.z, cfg);
  if (!orb.ok() || (int)orb.orbit.points.size() != n) return std::nullopt;
  auto pts = orb.orbit.points;
  size_t far = 0;
  for (size_t j = 1; j < pts.size(); ++j)
    if (pts[j].real() < pts[far].real()) far = j;
  std::rotate(pts.begin(), pts.begin() + far, pts.end());
  std::vector<long long> entries;
  for (int j = 1; j <= n - 2; ++j) {
    double v = pts[j].imag() / kTwoPi;
    long long u = std::llround(v);
    if (std::abs(v - (double)u) > 0.3) return std::nullopt;
    entries.push_back(u);
  }
  double v = pts[n - 1].imag() / kTwoPi;
  long long half = (long long)std::floor(v);
  if (std::abs(v - (double)half - 0.5) > 0.2) return std::nullopt;
  IntermediateAddress ia{entries, half};
  // flanking rays: same prefix, last entry floor resp. ceil of the half.
  // Both are compared with the tail along the vertical line through the
  // tail's deep parameter, so each ray is traced until its real part
  // crosses that line and the height there is interpolated.
  std::vector<long long> low = entries, high = entries;
  low.push_back(half);
  high.push_back(half + 1);
  auto im_at = [&cfg](const ExternalAddress& s,
                      double re) -> std::optional<double> {
    double t_hi = std::max(6.0, re + 2.0);
    for (double t_lo : {std::max(0.35, re - 3.0), 0.15}) {
      if (t_lo >= t_hi) continue;
      auto ray = trace_parameter_ray(s, t_hi, t_lo, cfg);
      if (ray.samples.size() < 2) continue;
      for (size_t i = 1; i < ray.samples.size(); ++i) {
        const Complex& a = ray.samples[i - 1].kappa;
        const Complex& b = ray.samples[i].kappa;
        if ((a.real() - re) * (b.real() - re) <= 0.0) {
          double span = a.real() - b.real();
          double u = std::abs(span) < 1e-15 ? 0.0 : (a.real() - re) / span;
          return a.imag() + u * (b.imag() - a.imag());
        }
      }
    }
    return std::nullopt;
  };
  double tail_im = deep.kappa.imag();
  auto low_im = im_at(external_address({}, low), deep.kappa.real());
  auto high_im = im_at(external_address({}, high), deep.kappa.real());
  if (!low_im || !high_im) return std::nullopt;
  if (!(*low_im < tail_im && tail_im < *high_im)) return std::nullopt;
  return ia;
}

}  // namespace expmap

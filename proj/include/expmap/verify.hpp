#pragma once

// Acceptance gate: nine numbered criteria, each a self-contained check with
// its tolerances pinned right here. Every criterion returns a pass flag and
// a one-line detail string; run_acceptance collects all nine and
// verify_report_json serializes the outcome.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <string>
#include <vector>

#include "components.hpp"
#include "io.hpp"
#include "kneading.hpp"
#include "rays.hpp"
#include "reference.hpp"
#include "render.hpp"

namespace expmap {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
};

namespace detail {

template <class... Args>
std::string strf(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf);
}

inline CriterionResult guard(int id, const char* name,
                             void (*body)(CriterionResult&, const Config&),
                             const Config& cfg) {
  CriterionResult r{id, name, false, ""};
  try {
    body(r, cfg);
  } catch (const std::exception& e) {
    r.pass = false;
    r.details = std::string("exception: ") + e.what();
  }
  return r;
}

// the fixed 20-address panel shared by criteria 3 and 4
inline std::vector<ExternalAddress> address_panel() {
  std::vector<ExternalAddress> out;
  for (long long a = -2; a <= 2; ++a) out.push_back(external_address({}, {a}));
  for (long long a = -1; a <= 1; ++a)
    for (long long b = -2; b <= 2; ++b)
      if (b != a) out.push_back(external_address({}, {a, b}));
  out.push_back(external_address({}, {2, 0}));
  out.push_back(external_address({}, {-2, 0}));
  out.push_back(external_address({}, {2, 1}));
  return out;
}

}  // namespace detail

// Criterion 1: the conformal coordinate, internal rays, boundary trace and
// internal-ray landings of the period-1 components reproduce the closed
// forms kappa = w + 2 pi i k - e^w (and its boundary restriction) at 1e-9
// over at least 200 probe points.
inline CriterionResult criterion1(const Config& cfg = {}) {
  return detail::guard(1, "period-1 closed forms",
                       [](CriterionResult& r, const Config& cfg) {
    const double tol = 1e-9;
    double worst = 0.0;
    int points = 0;
    auto track = [&](double err) {
      worst = std::max(worst, err);
      ++points;
    };

    const double res[] = {-2.5, -2.0, -1.5, -1.0, -0.5, -0.1};
    const double ims[] = {-2.5, -1.5, -0.5, 0.5, 1.5, 2.5};
    for (int k : {-1, 0, 1}) {
      auto comp = period1_component(k);
      for (double a : res)
        for (double b : ims) {
          Complex w(a, b);
          auto inv = phi_inverse(comp, w, cfg);
          if (inv.status != CompStatus::Ok) {
            r.details = detail::strf("phi_inverse failed at k=%d w=(%g,%g)",
                                     k, a, b);
            return;
          }
          double err = mag(inv.kappa - reference::period1_kappa(w, k));
          err = std::max(err,
                         mag(inv.z - reference::period1_fixed_point(w, k)));
          err = std::max(err, mag(inv.mu - std::exp(w)));
          track(err);
        }
    }

    auto w0 = period1_component(0);
    for (double h : {0.0, 0.25, 0.5}) {
      auto ray = internal_ray(w0, h, -3.0, -0.02, cfg);
      if (ray.status != CompStatus::Ok) {
        r.details = detail::strf("internal ray h=%g failed", h);
        return;
      }
      for (const auto& smp : ray.samples) {
        Complex w(smp.t, kTwoPi * h);
        double err = mag(smp.kappa - reference::period1_kappa(w, 0));
        err = std::max(err, mag(smp.mu - std::exp(w)));
        track(err);
      }
    }

    auto bd = boundary_trace(w0, 720, cfg);
    if (bd.status != CompStatus::Ok || !bd.gaps.empty()) {
      r.details = "boundary trace failed or left gaps";
      return;
    }
    for (const auto& smp : bd.samples)
      track(mag(smp.kappa - reference::period1_boundary(smp.theta, 0)));

    const double hs[] = {0.0, 0.25, 0.5};
    const Complex targets[] = {Complex(-1.0, 0.0),
                               Complex(0.0, kPi / 2.0 - 1.0),
                               Complex(1.0, kPi)};
    for (int i = 0; i < 3; ++i) {
      auto land = internal_ray_landing(w0, hs[i], cfg);
      if (land.status != CompStatus::Ok) {
        r.details = detail::strf("internal landing h=%g failed", hs[i]);
        return;
      }
      track(mag(land.kappa - targets[i]));
    }

    r.pass = points >= 200 && worst <= tol;
    r.details = detail::strf("%d probe points, max deviation %.3e (tol %g)",
                             points, worst, tol);
  }, cfg);
}

// Criterion 2: internal rays at heights 0, 1/4, 1/2, 0.37 land on the
// boundary of components of periods 1, 2 and 3 with measured multiplier
// within 1e-6 of e^{2 pi i h}; no trace may diverge to infinity.
inline CriterionResult criterion2(const Config& cfg = {}) {
  return detail::guard(2, "internal ray landings",
                       [](CriterionResult& r, const Config& cfg) {
    const double tol = 1e-6;
    auto w0 = period1_component(0);
    auto b2 = bifurcation_child(w0, 1, 2, cfg);
    auto b3 = bifurcation_child(w0, 1, 3, cfg);
    if (b2.status != CompStatus::Ok || b3.status != CompStatus::Ok) {
      r.details = "failed to construct the period-2 or period-3 component";
      return;
    }
    const HyperbolicComponent comps[] = {w0, b2.child, b3.child};
    int diverged = 0, failed = 0, total = 0;
    double worst = 0.0;
    for (const auto& comp : comps)
      for (double h : {0.0, 0.25, 0.5, 0.37}) {
        ++total;
        auto land = internal_ray_landing(comp, h, cfg);
        if (land.status == CompStatus::DivergedToInfinity) {
          ++diverged;
          continue;
        }
        if (land.status != CompStatus::Ok || !is_finite(land.kappa)) {
          ++failed;
          continue;
        }
        Complex target = std::exp(Complex(0.0, kTwoPi * h));
        worst = std::max(worst, mag(land.multiplier - target));
      }
    r.pass = diverged == 0 && failed == 0 && worst <= tol;
    r.details = detail::strf(
        "%d landings over periods 1,2,3: %d diverged, %d failed, "
        "max multiplier error %.3e (tol %g)",
        total, diverged, failed, worst, tol);
  }, cfg);
}

// Criterion 3: along each of the 20 panel rays the defect against the
// first-order asymptotics, |G_s(t) - t - 2 pi i s_1|, stays below
// 10 e^{-t} for t in [5, 20].
inline CriterionResult criterion3(const Config& cfg = {}) {
  return detail::guard(3, "ray asymptotic defect",
                       [](CriterionResult& r, const Config& cfg) {
    const double factor = 10.0;
    auto addrs = detail::address_panel();
    const double ts[] = {5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0};
    bool ok = true;
    double worst_ratio = 0.0, worst_t = 0.0;
    std::string worst_addr;
    for (const auto& s : addrs)
      for (double t : ts) {
        auto ae = ray_asymptotic_error(s, t, cfg);
        if (ae.status != RayStatus::Ok) {
          r.details = detail::strf("ray solve failed at %s t=%g",
                                   to_string(s).c_str(), t);
          return;
        }
        double ratio = ae.error / std::exp(-t);
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          worst_t = t;
          worst_addr = to_string(s);
        }
        ok = ok && ae.error <= factor * std::exp(-t);
      }
    r.pass = ok;
    r.details = detail::strf(
        "max defect / e^{-t} = %.2f at %s, t=%g (bound %.0f)", worst_ratio,
        worst_addr.c_str(), worst_t, factor);
  }, cfg);
}

// Criterion 4: at potential t = 20 the 20 panel rays are strictly resolved
// in height and their vertical order equals the lexicographic order of the
// addresses.
inline CriterionResult criterion4(const Config& cfg = {}) {
  return detail::guard(4, "vertical order at large potential",
                       [](CriterionResult& r, const Config& cfg) {
    auto addrs = detail::address_panel();
    auto vo = vertical_order(addrs, 20.0, cfg);
    if (vo.status != RayStatus::Ok) {
      r.details = std::string("vertical order status ") + to_string(vo.status);
      return;
    }
    std::vector<int> lex(addrs.size());
    std::iota(lex.begin(), lex.end(), 0);
    std::sort(lex.begin(), lex.end(), [&](int a, int b) {
      return lex_compare(addrs[(size_t)a], addrs[(size_t)b]) == Ordering::Less;
    });
    r.pass = vo.order == lex;
    r.details = detail::strf(
        "%zu rays at t=20: vertical order %s lexicographic order",
        addrs.size(), r.pass ? "matches" : "differs from");
  }, cfg);
}

// Criterion 5: the ray at constant address 0 lands at -1 within 1e-4, and
// the ray at address [;0,1] lands at a parameter carrying an orbit of
// period at most 2 whose multiplier has modulus 1 within 1e-3 and argument
// pi within 1e-2.
inline CriterionResult criterion5(const Config& cfg = {}) {
  return detail::guard(5, "pinned ray landings",
                       [](CriterionResult& r, const Config& cfg) {
    auto ray0 = trace_parameter_ray(external_address({}, {0}), 10.0, 0.02,
                                    cfg);
    auto land0 = estimate_landing(ray0, cfg);
    double err0 = mag(land0.kappa - Complex(-1.0, 0.0));
    bool part0 = ray0.status == RayStatus::Ok && land0.converged &&
                 err0 <= 1e-4;

    auto ray01 = trace_parameter_ray(external_address({}, {0, 1}), 10.0,
                                     0.012, cfg);
    auto land1 = estimate_landing(ray01, cfg);
    bool traced1 = ray01.status == RayStatus::Ok && land1.converged;
    bool part1 = false;
    double mod_err = 0.0, arg_err = 0.0;
    if (traced1) {
      for (int n = 1; n <= 2 && !part1; ++n) {
        auto orb = find_periodic_orbit(land1.kappa, n, Complex(0.0, kPi),
                                       cfg);
        bool usable = (orb.ok() ||
                       orb.status == SolveStatus::DegenerateDerivative) &&
                      orb.residual <= 1e-8;
        if (!usable) continue;
        Complex mu = orb.orbit.multiplier;
        mod_err = std::abs(mag(mu) - 1.0);
        arg_err = std::abs(std::remainder(std::arg(mu) - kPi, kTwoPi));
        part1 = mod_err <= 1e-3 && arg_err < 1e-2;
      }
    }
    r.pass = part0 && part1;
    r.details = detail::strf(
        "constant-0 ray lands %.2e from -1 (tol 1e-4); [;0,1] orbit "
        "| |mu|-1 | = %.2e (tol 1e-3), |arg mu - pi| = %.2e (tol 1e-2)", err0,
        mod_err, arg_err);
  }, cfg);
}

// Criterion 6: the frozen kneading table holds exactly, and over all 145
// periodic addresses with period <= 3 and entries in [-2,2] the kneading
// sequence carries a boundary symbol, while preperiodic addresses carry
// none.
inline CriterionResult criterion6(const Config& cfg = {}) {
  return detail::guard(6, "kneading sequences",
                       [](CriterionResult& r, const Config&) {
    using Sym = KneadingSymbol;
    bool ok = true;

    auto k0 = kneading_sequence(external_address({}, {0}));
    ok = ok && k0.preperiod.empty() &&
         k0.period == std::vector<Sym>{{true, 0}};
    auto k01 = kneading_sequence(external_address({}, {0, 1}));
    ok = ok && k01.preperiod.empty() &&
         k01.period == std::vector<Sym>{{false, 0}, {true, 1}};
    auto k10pre = kneading_sequence(external_address({1}, {0}));
    ok = ok && k10pre.preperiod == std::vector<Sym>{{false, 0}} &&
         k10pre.period == std::vector<Sym>{{false, -1}};
    auto k20 = kneading_sequence(external_address({}, {2, 0}));
    ok = ok && k20.period == std::vector<Sym>{{false, 1}, {true, 0}};
    auto k1 = kneading_sequence(external_address({}, {1}));
    ok = ok && k1.period == std::vector<Sym>{{true, 1}};
    auto k10 = kneading_sequence(external_address({}, {1, 0}));
    ok = ok && k10.period == std::vector<Sym>{{false, 0}, {true, 0}};

    ok = ok && to_string(kneading_sequence(parse_external("[;0,1]"))) ==
                   "0,<0|1> (period 2)";
    ok = ok && to_string(kneading_sequence(parse_external("[1;0]"))) ==
                   "0;-1 (preperiod 1, period 1)";
    ok = ok && to_string(kneading_sequence(parse_external("[;0]"))) ==
                   "<-1|0> (period 1)";

    int periodic_count = 0;
    for (long long a = -2; a <= 2; ++a) {
      ++periodic_count;
      ok = ok && kneading_sequence(external_address({}, {a})).has_boundary();
    }
    for (long long a = -2; a <= 2; ++a)
      for (long long b = -2; b <= 2; ++b) {
        if (a == b) continue;
        ++periodic_count;
        ok = ok &&
             kneading_sequence(external_address({}, {a, b})).has_boundary();
      }
    for (long long a = -2; a <= 2; ++a)
      for (long long b = -2; b <= 2; ++b)
        for (long long c = -2; c <= 2; ++c) {
          if (a == b && b == c) continue;
          ++periodic_count;
          ok = ok && kneading_sequence(external_address({}, {a, b, c}))
                         .has_boundary();
        }

    int preperiodic_count = 0;
    for (long long a = -2; a <= 2; ++a)
      for (long long b = -2; b <= 2; ++b) {
        if (a == b) continue;
        ++preperiodic_count;
        ok = ok &&
             !kneading_sequence(external_address({a}, {b})).has_boundary();
      }

    r.pass = ok && periodic_count == 145 && preperiodic_count == 20;
    r.details = detail::strf(
        "frozen table %s; %d periodic addresses all carry a boundary "
        "symbol, %d preperiodic carry none",
        ok ? "exact" : "BROKEN", periodic_count, preperiodic_count);
  }, cfg);
}

// Criterion 7: every traced sample with t >= 1 on the constant rays
// classifies as Escaping with strip entries matching the address, and each
// ray shows a sample below t = 0.86 whose itinerary is exact to depth 5.
inline CriterionResult criterion7(const Config& cfg = {}) {
  return detail::guard(7, "ray itineraries",
                       [](CriterionResult& r, const Config& cfg) {
    bool ok = true;
    int checked = 0, witnesses_total = 0;
    for (long long a = -2; a <= 2; ++a) {
      auto s = external_address({}, {a});
      auto ray = trace_parameter_ray(s, 6.0, 0.5, cfg);
      if (ray.status != RayStatus::Ok) {
        r.details = detail::strf("trace failed at %s", to_string(s).c_str());
        return;
      }
      int witnesses = 0;
      for (const auto& p : ray.samples) {
        if (p.t >= 1.0) {
          ++checked;
          auto cl = classify_singular_orbit(p.kappa, cfg);
          auto* esc = std::get_if<Escaping>(&cl);
          if (!esc || esc->address_prefix.empty()) {
            ok = false;
            continue;
          }
          for (size_t j = 0; j < esc->address_prefix.size(); ++j)
            ok = ok && esc->address_prefix[j] == s.entry(j);
        }
        if (p.t < 0.86) {
          auto out = address_of_escape(orbit(p.kappa, p.kappa, 16), cfg);
          if (out.entries.size() >= 5) {
            bool match = true;
            for (int i = 0; i < 5; ++i)
              match = match && out.entries[i] == a;
            if (match) ++witnesses;
          }
        }
      }
      ok = ok && witnesses >= 1;
      witnesses_total += witnesses;
    }
    r.pass = ok;
    r.details = detail::strf(
        "%d samples with t>=1 classify Escaping with matching strips; "
        "%d depth-5 witnesses below t=0.86",
        checked, witnesses_total);
  }, cfg);
}

// Criterion 8: the period-3 census over [0,8] x (-pi,pi) finds at least 5
// components and bifurcation chains of depth 4 leave more than one
// connectivity class among them.
inline CriterionResult criterion8(const Config& cfg = {}) {
  return detail::guard(8, "period-3 census and chains",
                       [](CriterionResult& r, const Config& cfg) {
    Window win{0.0, 8.0, -kPi + 0.02, kPi - 0.02};
    auto comps = find_components(3, win, 0.02, cfg);
    auto classes = chain_connectivity(comps, 4, cfg);
    r.pass = comps.size() >= 5 && classes.size() > 1;
    r.details = detail::strf(
        "%zu period-3 components (need >= 5); depth-4 chains leave %zu "
        "connectivity classes (need > 1)",
        comps.size(), classes.size());
  }, cfg);
}

// Criterion 9: rendering is byte-identical across repeat runs and worker
// counts, and over the window [-3,0] x [-1,1] the period-1 coloring agrees
// with the closed-form membership test on at least 99% of pixels.
inline CriterionResult criterion9(const Config& cfg = {}) {
  return detail::guard(9, "render determinism",
                       [](CriterionResult& r, const Config& cfg) {
    RenderSpec spec;
    spec.window = {-3.0, 0.0, -1.0, 1.0};
    spec.width = 125;
    spec.height = 50;
    Config one = cfg, three = cfg;
    one.threads = 1;
    three.threads = 3;
    auto img1 = render(spec, one);
    auto img3 = render(spec, three);
    auto img3b = render(spec, three);
    bool identical = img1.pixels == img3.pixels &&
                     img3.pixels == img3b.pixels &&
                     image_hash(img1) == image_hash(img3b);

    Palette pal = default_palette(one.period_cap);
    double dx = (spec.window.re_hi - spec.window.re_lo) / spec.width;
    double dy = (spec.window.im_hi - spec.window.im_lo) / spec.height;
    int agree = 0, total = spec.width * spec.height;
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        Complex kappa(spec.window.re_lo + (x + 0.5) * dx,
                      spec.window.im_hi - (y + 0.5) * dy);
        bool inside = reference::in_period1_component(kappa, 0);
        bool painted = img1.at(x, y) == pal.for_period(1);
        if (inside == painted) ++agree;
      }
    double frac = (double)agree / total;
    r.pass = identical && frac >= 0.99;
    r.details = detail::strf(
        "threads 1 vs 3 and repeat runs %s; period-1 window agreement "
        "%.2f%% (need >= 99%%)",
        identical ? "byte-identical" : "DIFFER", 100.0 * frac);
  }, cfg);
}

inline std::vector<CriterionResult> run_acceptance(const Config& cfg = {}) {
  return {criterion1(cfg), criterion2(cfg), criterion3(cfg), criterion4(cfg),
          criterion5(cfg), criterion6(cfg), criterion7(cfg), criterion8(cfg),
          criterion9(cfg)};
}

inline Json verify_report_json(const std::vector<CriterionResult>& results) {
  Json arr = Json::array();
  bool all = true;
  for (const auto& r : results) {
    arr.push_back(Json{{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"details", r.details}});
    all = all && r.pass;
  }
  return Json{{"criteria", arr}, {"all_pass", all}};
}

}  // namespace expmap

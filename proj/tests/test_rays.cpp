#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "expmap/dynamics.hpp"
#include "expmap/kneading.hpp"
#include "expmap/rays.hpp"

using namespace expmap;

namespace {

ExternalAddress addr(std::vector<long long> per) {
  return external_address({}, std::move(per));
}

std::vector<int> lex_sorted_indices(const std::vector<ExternalAddress>& v) {
  std::vector<int> idx(v.size());
  for (size_t i = 0; i < v.size(); ++i) idx[i] = (int)i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return lex_compare(v[a], v[b]) == Ordering::Less;
  });
  return idx;
}

}  // namespace

TEST_CASE("ray depth rule", "[rays]") {
  Config cfg;
  CHECK(ray_depth(60.0, cfg) == 0);
  CHECK(ray_depth(800.0, cfg) == 0);
  CHECK(ray_depth(20.0, cfg) == 1);
  CHECK(ray_depth(3.0, cfg) == 2);  // F(3)=19.09, F^2(3)=1.9e8
  CHECK(ray_depth(1.0, cfg) == 3);  // 1, 1.72, 4.57, 95.6
  int n_small = ray_depth(0.02, cfg);
  CHECK(n_small > 50);
  CHECK(n_small < cfg.depth_cap);
  CHECK(ray_depth(1e-8, cfg) == cfg.depth_cap);
}

TEST_CASE("dynamic ray point at depth zero is exact", "[rays]") {
  auto s = addr({1});
  auto ev = dynamic_ray_point(Complex(0, 0), s, 60.0, 0);
  REQUIRE(ev.status == RayStatus::Ok);
  CHECK(ev.w0 == Complex(60.0, kTwoPi));
}

TEST_CASE("dynamic ray point inverts the forward map", "[rays]") {
  // pulling w0 forward through E_kappa must reproduce the backwards orbit
  // endpoint F^N(t) + 2pi*i*s_{N+1}
  auto s = addr({1, 0, -1});
  Complex kappa(0.3, 0.2);
  double t = 2.0;
  int depth = ray_depth(t);
  REQUIRE(depth == 2);  // 2, 6.39, then 594.3 > escape radius
  auto ev = dynamic_ray_point(kappa, s, t, depth);
  REQUIRE(ev.status == RayStatus::Ok);
  Complex z = ev.w0;
  for (int j = 0; j < depth; ++j) {
    // each backwards level sits in the strip of its address entry
    CHECK(std::abs(z.imag() - kTwoPi * (double)s.entry(j)) < kPi);
    z = eval_map(kappa, z);
  }
  Complex target(f_iterate(t, depth).value, kTwoPi * (double)s.entry(depth));
  CHECK(mag(z - target) < 1e-6 * std::abs(target.real()));
}

TEST_CASE("dynamic ray point error statuses", "[rays]") {
  auto zero = addr({0});
  // kappa placed on the backwards orbit pushes a pullback argument onto
  // the cut
  double w1 = std::log(f_iterate(3.0, 2).value);
  auto ev = dynamic_ray_point(Complex(w1 + 5.0, 0.0), zero, 3.0, 2);
  CHECK(ev.status == RayStatus::BranchCollision);
  CHECK(ev.index == 1);

  auto ov = dynamic_ray_point(Complex(0, 0), zero, 20.0, 3);
  CHECK(ov.status == RayStatus::DepthOverflow);
  CHECK(ov.index == 1);
}

TEST_CASE("ray point solve matches asymptotics at large t", "[rays]") {
  Config cfg;
  auto zero = addr({0});
  auto sol = solve_ray_point(zero, 20.0, asymptotic_seed(zero, 20.0), cfg);
  REQUIRE(sol.status == RayStatus::Ok);
  CHECK(sol.residual < cfg.fp_tol);
  CHECK(sol.kappa.imag() == 0.0);  // real data stays exactly real
  CHECK(std::abs(sol.kappa.real() - 20.0) < 1e-6);

  auto one = addr({1});
  auto sol1 = solve_ray_point(one, 20.0, asymptotic_seed(one, 20.0), cfg);
  REQUIRE(sol1.status == RayStatus::Ok);
  CHECK(std::abs(sol1.kappa.imag() - kTwoPi) < 1e-6);
  CHECK(std::abs(sol1.kappa.real() - 20.0) < 1e-6);

  // the solution is a genuine fixed point of the backwards iteration
  auto ev = dynamic_ray_point(sol1.kappa, one, 20.0, sol1.depth, cfg);
  REQUIRE(ev.status == RayStatus::Ok);
  CHECK(mag(ev.w0 - sol1.kappa) < 1e-9);
}

TEST_CASE("real ray trace stays real and heads to -1", "[rays]") {
  Config cfg;
  auto zero = addr({0});
  auto ray = trace_parameter_ray(zero, 20.0, 0.05, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  REQUIRE(ray.samples.size() > 20);
  CHECK(ray.samples.front().t == 20.0);
  CHECK(std::abs(ray.samples.back().t - 0.05) < 1e-12);
  for (size_t i = 0; i < ray.samples.size(); ++i) {
    const auto& p = ray.samples[i];
    CHECK(p.kappa.imag() == 0.0);
    CHECK(p.kappa.real() > -1.0);
    CHECK(p.residual < cfg.fp_tol);
    if (i > 0) {
      CHECK(p.t < ray.samples[i - 1].t);
      CHECK(p.kappa.real() < ray.samples[i - 1].kappa.real());
    }
  }
  CHECK(ray.samples.back().kappa.real() < -0.9);
}

TEST_CASE("real ray lands at -1", "[rays]") {
  Config cfg;
  auto ray = trace_parameter_ray(addr({0}), 10.0, 0.02, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  auto est = estimate_landing(ray, cfg);
  REQUIRE(est.converged);
  CHECK(mag(est.kappa - Complex(-1.0, 0.0)) < 1e-4);
  CHECK(std::abs(est.kappa.imag()) < 1e-6);
}

TEST_CASE("truncated ray does not claim a landing", "[rays]") {
  Config cfg;
  auto ray = trace_parameter_ray(addr({0}), 10.0, 1.0, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  auto est = estimate_landing(ray, cfg);
  CHECK_FALSE(est.converged);
}

TEST_CASE("period two ray lands at an indifferent parameter", "[rays]") {
  Config cfg;
  auto ray = trace_parameter_ray(addr({0, 1}), 10.0, 0.012, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  auto est = estimate_landing(ray, cfg);
  REQUIRE(est.converged);
  // the landing parameter carries a fixed point with multiplier -1
  CHECK(mag(est.kappa - Complex(1.0, kPi)) < 5e-3);
  auto orb = find_periodic_orbit(est.kappa, 1, Complex(0.0, kPi), cfg);
  REQUIRE(orb.ok());
  CHECK(std::abs(mag(orb.orbit.multiplier) - 1.0) < 1e-3);
  CHECK(std::abs(std::remainder(std::arg(orb.orbit.multiplier) - kPi,
                                kTwoPi)) < 1e-2);
}

TEST_CASE("asymptotic defect decays like exp(-t)", "[rays]") {
  Config cfg;
  auto s = addr({1, 0});
  double e5 = ray_asymptotic_error(s, 5.0, cfg).error;
  double e10 = ray_asymptotic_error(s, 10.0, cfg).error;
  double e20 = ray_asymptotic_error(s, 20.0, cfg).error;
  CHECK(e20 < 1e-6);
  CHECK(e5 > e10);
  CHECK(e10 > e20);
  for (double t : {5.0, 10.0, 20.0}) {
    double ratio = ray_asymptotic_error(s, t, cfg).error / std::exp(-t);
    CHECK(ratio > 1.0);
    CHECK(ratio < 50.0);
  }
}

TEST_CASE("rays are pairwise disjoint at equal potential", "[rays]") {
  Config cfg;
  std::vector<ExternalAddress> set = {addr({0}), addr({0, 1}), addr({0, -1})};
  std::vector<Complex> ks;
  for (const auto& s : set) {
    auto sol = solve_ray_point(s, 10.0, asymptotic_seed(s, 10.0), cfg);
    REQUIRE(sol.status == RayStatus::Ok);
    ks.push_back(sol.kappa);
  }
  for (size_t a = 0; a < ks.size(); ++a)
    for (size_t b = a + 1; b < ks.size(); ++b)
      CHECK(mag(ks[a] - ks[b]) > 1e-6);
}

TEST_CASE("vertical order matches the lexicographic order", "[rays]") {
  Config cfg;
  std::vector<ExternalAddress> set = {addr({1}), addr({0}), addr({-1})};
  auto vo = vertical_order(set, 20.0, cfg);
  REQUIRE(vo.status == RayStatus::Ok);
  CHECK(vo.order == std::vector<int>{2, 1, 0});

  // twenty addresses with pairwise distinct leading pairs
  std::vector<ExternalAddress> big;
  for (long long a = -2; a <= 2; ++a) big.push_back(addr({a}));
  for (long long a = -1; a <= 1; ++a)
    for (long long b = -2; b <= 2; ++b)
      if (a != b) big.push_back(addr({a, b}));
  big.push_back(addr({2, 0}));
  big.push_back(addr({-2, 0}));
  big.push_back(addr({2, 1}));
  REQUIRE(big.size() == 20);

  auto vb = vertical_order(big, 20.0, cfg);
  REQUIRE(vb.status == RayStatus::Ok);
  CHECK(vb.order == lex_sorted_indices(big));
}

TEST_CASE("vertical order flags coincident rays", "[rays]") {
  Config cfg;
  std::vector<ExternalAddress> set = {addr({0}), addr({0})};
  auto vo = vertical_order(set, 10.0, cfg);
  CHECK(vo.status == RayStatus::Unresolved);
  REQUIRE(vo.clash.has_value());
}

TEST_CASE("ray samples escape with the right itinerary", "[rays]") {
  Config cfg;
  auto s = addr({1, 0, -1});
  for (double t : {1.0, 1.5}) {
    auto ray = trace_parameter_ray(s, 6.0, t, cfg);
    REQUIRE(ray.status == RayStatus::Ok);
    Complex kappa = ray.samples.back().kappa;
    auto cls = classify_singular_orbit(kappa, cfg);
    REQUIRE(std::holds_alternative<Escaping>(cls));
    auto addr_out = address_of_escape(orbit(kappa, kappa, 24), cfg);
    REQUIRE(addr_out.entries.size() >= 3);
    for (size_t i = 0; i < addr_out.entries.size(); ++i)
      CHECK(addr_out.entries[i] == s.entry(i));
  }
}

TEST_CASE("itinerary is exact to depth five at small potential", "[rays]") {
  Config cfg;
  for (long long a : {-2LL, -1LL, 0LL, 1LL, 2LL}) {
    auto s = addr({a});
    auto ray = trace_parameter_ray(s, 6.0, 0.5, cfg);
    REQUIRE(ray.status == RayStatus::Ok);
    for (const auto& p : ray.samples) {
      if (p.t > 0.86) continue;
      auto out = address_of_escape(orbit(p.kappa, p.kappa, 16), cfg);
      REQUIRE(out.entries.size() >= 5);
      for (int i = 0; i < 5; ++i) CHECK(out.entries[i] == a);
    }
  }
}

TEST_CASE("real part grows monotonically along a ray tail", "[rays]") {
  Config cfg;
  auto ray = trace_parameter_ray(addr({1, 0}), 20.0, 4.0, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  for (size_t i = 1; i < ray.samples.size(); ++i)
    CHECK(ray.samples[i].kappa.real() < ray.samples[i - 1].kappa.real());
}

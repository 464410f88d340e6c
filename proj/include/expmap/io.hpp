#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "address.hpp"
#include "components.hpp"
#include "dynamics.hpp"
#include "rays.hpp"

// Data-file formats emitted by the CLI: CSV for sampled curves, JSON for
// structured records. All numbers print with enough digits to round-trip,
// so identical inputs give byte-identical files.

namespace expmap {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json complex_json(const Complex& z) {
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace detail

// columns: t, Re(kappa), Im(kappa), residual, depth
inline std::string ray_csv(const ParameterRay& ray) {
  std::string out = "t,re_kappa,im_kappa,residual,depth\n";
  for (const auto& s : ray.samples) {
    out += detail::num(s.t);
    out += ',';
    out += detail::num(s.kappa.real());
    out += ',';
    out += detail::num(s.kappa.imag());
    out += ',';
    out += detail::num(s.residual);
    out += ',';
    out += std::to_string(s.depth);
    out += '\n';
  }
  return out;
}

// columns: t, Re(kappa), Im(kappa), Re(mu), Im(mu)
inline std::string internal_ray_csv(const InternalRay& ray) {
  std::string out = "t,re_kappa,im_kappa,re_mu,im_mu\n";
  for (const auto& s : ray.samples) {
    out += detail::num(s.t);
    out += ',';
    out += detail::num(s.kappa.real());
    out += ',';
    out += detail::num(s.kappa.imag());
    out += ',';
    out += detail::num(s.mu.real());
    out += ',';
    out += detail::num(s.mu.imag());
    out += '\n';
  }
  return out;
}

// address, landing estimate with error bar, and what the landing parameter
// turned out to be dynamically
inline Json ray_summary_json(const ExternalAddress& addr,
                             const ParameterRay& ray,
                             const Config& cfg = {}) {
  Json j;
  j["address"] = to_string(addr);
  j["status"] = to_string(ray.status);
  j["samples"] = ray.samples.size();
  if (!ray.samples.empty()) {
    j["tMin"] = ray.samples.back().t;
    j["tMax"] = ray.samples.front().t;
  }
  j["landing"] = Json();
  if (ray.landing) {
    j["landing"]["converged"] = ray.landing->converged;
    j["landing"]["estimate"] = detail::complex_json(ray.landing->kappa);
    j["landing"]["errorBar"] = ray.landing->error_bar;
    if (ray.landing->converged && is_finite(ray.landing->kappa)) {
      auto cls = classify_singular_orbit(ray.landing->kappa, cfg);
      j["landing"]["classification"] = classification_name(cls);
      if (auto* att = std::get_if<Attracting>(&cls))
        j["landing"]["period"] = att->period;
      if (auto* ind = std::get_if<Indifferent>(&cls))
        j["landing"]["period"] = ind->period;
    } else {
      j["landing"]["classification"] = nullptr;
    }
  } else {
    j["landing"]["converged"] = false;
    j["landing"]["classification"] = nullptr;
  }
  return j;
}

// period, seed, branch tag, optional intermediate address, boundary
// polyline, children list
inline Json component_json(const HyperbolicComponent& w,
                           const ComponentBoundary* boundary = nullptr,
                           const std::vector<Bifurcation>* children = nullptr) {
  Json j;
  j["period"] = w.period;
  j["seed"] = Json();
  j["seed"]["kappa"] = detail::complex_json(w.seed.kappa);
  j["seed"]["z"] = detail::complex_json(w.seed.z);
  j["seed"]["mu"] = detail::complex_json(w.seed.mu);
  j["branchTag"] = w.branch_tag;
  if (w.address) {
    j["intermediateAddress"] = to_string(*w.address);
    j["addressEmpirical"] = w.address_empirical;
  } else {
    j["intermediateAddress"] = nullptr;
  }
  if (boundary) {
    Json poly = Json::array();
    for (const auto& s : boundary->samples) {
      poly.push_back(Json::array(
          {s.kappa.real(), s.kappa.imag()}));
    }
    j["boundary"] = Json();
    j["boundary"]["closed"] = boundary->closed;
    j["boundary"]["polyline"] = std::move(poly);
  }
  if (children) {
    Json kids = Json::array();
    for (const auto& c : *children) {
      Json kid;
      kid["period"] = c.child.period;
      kid["attachment"] = detail::complex_json(c.attachment);
      kid["seedKappa"] = detail::complex_json(c.child.seed.kappa);
      kids.push_back(std::move(kid));
    }
    j["children"] = std::move(kids);
  }
  return j;
}

}  // namespace expmap

// expmap: explorer CLI for the exponential family e^z + kappa.
//
// Subcommands: render, trace-ray, internal-ray, kneading, components,
// bifurcations, verify. Configuration is layered: built-in defaults, the
// file named by EXPMAP_CONFIG, an explicit --config file, then repeated
// --set key=value flags. Exit codes: 0 success, 1 usage error, 2 numerical
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "expmap/expmap.hpp"

namespace {

using namespace expmap;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Window parse_window(const std::string& s) {
  double v[4];
  char extra;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf:%lf%c", &v[0], &v[1], &v[2], &v[3],
                  &extra) != 4)
    throw UsageError("bad --window, expected reLo:reHi:imLo:imHi: " + s);
  if (!(v[0] < v[1] && v[2] < v[3]))
    throw UsageError("bad --window, bounds must be increasing: " + s);
  return {v[0], v[1], v[2], v[3]};
}

void parse_size(const std::string& s, int& w, int& h) {
  char extra;
  if (std::sscanf(s.c_str(), "%dx%d%c", &w, &h, &extra) != 2 || w < 1 ||
      h < 1)
    throw UsageError("bad --size, expected WIDTHxHEIGHT: " + s);
}

void parse_pq(const std::string& s, int& p, int& q) {
  char extra;
  if (std::sscanf(s.c_str(), "%d/%d%c", &p, &q, &extra) != 2)
    throw UsageError("bad fraction, expected p/q: " + s);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("cannot open output file: " + path);
  out << text;
}

// component selector shared by internal-ray and bifurcations: the period-1
// component on --branch, descended through each --child p/q in order
HyperbolicComponent select_component(int branch,
                                     const std::vector<std::string>& children,
                                     const Config& cfg) {
  HyperbolicComponent comp = period1_component(branch);
  for (const auto& spec : children) {
    int p = 0, q = 0;
    parse_pq(spec, p, q);
    Bifurcation b = bifurcation_child(comp, p, q, cfg);
    if (b.status != CompStatus::Ok)
      throw NumericalError(std::string("bifurcation ") + spec + " failed: " +
                           to_string(b.status));
    comp = b.child;
  }
  return comp;
}

int cmd_render(const std::string& window_s, const std::string& size_s,
               const std::string& out, int threads,
               const std::vector<std::string>& ray_specs, double ray_tmax,
               double ray_tmin, const std::vector<std::string>& internal_specs,
               double internal_tstart, double internal_tend, Config cfg) {
  RenderSpec spec;
  spec.window = parse_window(window_s);
  parse_size(size_s, spec.width, spec.height);
  if (threads > 0) cfg.threads = threads;

  Image img = render(spec, cfg);

  std::vector<ParameterRay> rays;
  for (const auto& rs : ray_specs) {
    ParameterRay ray = trace_parameter_ray(parse_external(rs), ray_tmax,
                                           ray_tmin, cfg);
    if (ray.status != RayStatus::Ok)
      throw NumericalError("ray overlay " + rs + " failed: " +
                           to_string(ray.status));
    rays.push_back(std::move(ray));
  }
  std::vector<InternalRay> internals;
  for (const auto& is : internal_specs) {
    int branch = 0;
    double h = 0.0;
    char extra;
    if (std::sscanf(is.c_str(), "%d:%lf%c", &branch, &h, &extra) != 2)
      throw UsageError("bad --internal, expected BRANCH:HEIGHT: " + is);
    InternalRay ray = internal_ray(period1_component(branch), h,
                                   internal_tstart, internal_tend, cfg);
    if (ray.status != CompStatus::Ok)
      throw NumericalError("internal overlay " + is + " failed: " +
                           to_string(ray.status));
    internals.push_back(std::move(ray));
  }
  if (!rays.empty() || !internals.empty())
    img = overlay_rays(std::move(img), spec, rays, internals);

  bool png = out.size() > 4 && out.substr(out.size() - 4) == ".png";
  if (png) {
#ifdef EXPMAP_HAVE_ZLIB
    write_png(img, out);
#else
    throw UsageError("png output requires a zlib build; write .ppm instead");
#endif
  } else {
    write_ppm(img, out);
  }
  std::printf("wrote %dx%d image to %s (hash %016llx)\n", img.width,
              img.height, out.c_str(),
              (unsigned long long)image_hash(img));
  return 0;
}

int cmd_trace_ray(const std::string& addr_s, double tmax, double tmin,
                  const std::string& out, const std::string& summary,
                  const Config& cfg) {
  ExternalAddress addr = parse_external(addr_s);
  ParameterRay ray = trace_parameter_ray(addr, tmax, tmin, cfg);
  ray.landing = estimate_landing(ray, cfg);
  write_text(out, ray_csv(ray));
  if (!summary.empty())
    write_text(summary, ray_summary_json(addr, ray, cfg).dump(2) + "\n");
  if (ray.status != RayStatus::Ok)
    throw NumericalError(std::string("ray trace ended with status ") +
                         to_string(ray.status));
  return 0;
}

int cmd_internal_ray(int branch, const std::vector<std::string>& children,
                     double height, double tstart, double tend,
                     const std::string& out, const Config& cfg) {
  HyperbolicComponent comp = select_component(branch, children, cfg);
  InternalRay ray = internal_ray(comp, height, tstart, tend, cfg);
  write_text(out, internal_ray_csv(ray));
  if (ray.status != CompStatus::Ok)
    throw NumericalError(std::string("internal ray ended with status ") +
                         to_string(ray.status));
  return 0;
}

int cmd_kneading(const std::string& addr_s) {
  std::cout << to_string(kneading_sequence(parse_external(addr_s))) << "\n";
  return 0;
}

int cmd_components(int period, const std::string& window_s, double step,
                   int boundary_steps, const std::vector<std::string>& kid_pqs,
                   bool addresses, const std::string& out, const Config& cfg) {
  Window win = parse_window(window_s);
  if (step <= 0.0) step = cfg.census_grid_step;
  auto comps = find_components(period, win, step, cfg);

  Json arr = Json::array();
  for (auto& comp : comps) {
    if (addresses && comp.period >= 2 && !comp.address) {
      if (auto ia = assign_intermediate_address(comp, cfg)) {
        comp.address = *ia;
        comp.address_empirical = true;
      }
    }
    ComponentBoundary bd;
    const ComponentBoundary* bdp = nullptr;
    if (boundary_steps > 0) {
      bd = boundary_trace(comp, boundary_steps, cfg);
      if (bd.status == CompStatus::Ok) bdp = &bd;
      else
        std::cerr << "boundary trace skipped for a component: "
                  << to_string(bd.status) << "\n";
    }
    std::vector<Bifurcation> kids;
    const std::vector<Bifurcation>* kidsp = nullptr;
    for (const auto& spec : kid_pqs) {
      int p = 0, q = 0;
      parse_pq(spec, p, q);
      Bifurcation b = bifurcation_child(comp, p, q, cfg);
      if (b.status == CompStatus::Ok) kids.push_back(std::move(b));
      else
        std::cerr << "child " << spec << " skipped for a component: "
                  << to_string(b.status) << "\n";
    }
    if (!kids.empty()) kidsp = &kids;
    arr.push_back(component_json(comp, bdp, kidsp));
  }
  Json j;
  j["period"] = period;
  j["count"] = comps.size();
  j["components"] = arr;
  write_text(out, j.dump(2) + "\n");
  return 0;
}

int cmd_bifurcations(int branch, const std::vector<std::string>& base,
                     const std::vector<std::string>& pqs,
                     const std::string& out, const Config& cfg) {
  HyperbolicComponent parent = select_component(branch, base, cfg);
  Json arr = Json::array();
  for (const auto& spec : pqs) {
    int p = 0, q = 0;
    parse_pq(spec, p, q);
    Bifurcation b = bifurcation_child(parent, p, q, cfg);
    if (b.status != CompStatus::Ok)
      throw NumericalError(std::string("bifurcation ") + spec + " failed: " +
                           to_string(b.status));
    Json rec;
    rec["p"] = p;
    rec["q"] = q;
    rec["attachment"] = detail::complex_json(b.attachment);
    rec["child"] = component_json(b.child);
    arr.push_back(rec);
  }
  Json j;
  j["parent"] = component_json(parent);
  j["children"] = arr;
  write_text(out, j.dump(2) + "\n");
  return 0;
}

int cmd_verify(const std::string& out, const Config& cfg) {
  CriterionResult (*criteria[])(const Config&) = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9};
  std::vector<CriterionResult> results;
  for (auto* fn : criteria) {
    results.push_back(fn(cfg));
    const auto& r = results.back();
    std::fprintf(stderr, "CRITERION %d: %s - %s (%s)\n", r.id,
                 r.pass ? "PASS" : "FAIL", r.name.c_str(),
                 r.details.c_str());
  }
  Json report = verify_report_json(results);
  write_text(out, report.dump(2) + "\n");
  return report["all_pass"].get<bool>() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explorer for the exponential family e^z + kappa"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> sets;
  app.add_option("--config", config_file, "key=value config file");
  app.add_option("--set", sets, "override one config key, e.g. core.maxIter=500")
      ->allow_extra_args(false);

  auto* render_cmd = app.add_subcommand("render", "parameter plane image");
  std::string r_window = "-6:6:-4:4", r_size = "800x600", r_out = "expmap.ppm";
  int r_threads = 0;
  std::vector<std::string> r_rays, r_internals;
  double r_tmax = 8.0, r_tmin = 0.05, r_itstart = -4.0, r_itend = -0.02;
  render_cmd->add_option("--window", r_window, "reLo:reHi:imLo:imHi");
  render_cmd->add_option("--size", r_size, "WIDTHxHEIGHT");
  render_cmd->add_option("--out", r_out, "output image (.ppm or .png)");
  render_cmd->add_option("--threads", r_threads, "worker count (0 = auto)");
  render_cmd->add_option("--ray", r_rays, "overlay a parameter ray, e.g. [;0]")
      ->allow_extra_args(false);
  render_cmd->add_option("--ray-tmax", r_tmax, "overlay ray start potential");
  render_cmd->add_option("--ray-tmin", r_tmin, "overlay ray end potential");
  render_cmd->add_option("--internal", r_internals,
                         "overlay an internal ray BRANCH:HEIGHT")
      ->allow_extra_args(false);
  render_cmd->add_option("--internal-tstart", r_itstart, "internal ray start");
  render_cmd->add_option("--internal-tend", r_itend, "internal ray end");

  auto* trace_cmd = app.add_subcommand("trace-ray", "parameter ray to CSV");
  std::string t_addr, t_out = "-", t_summary;
  double t_tmax = 20.0, t_tmin = 0.05;
  trace_cmd->add_option("address", t_addr, "external address, e.g. [;0,1]")
      ->required();
  trace_cmd->add_option("--tmax", t_tmax, "start potential");
  trace_cmd->add_option("--tmin", t_tmin, "end potential");
  trace_cmd->add_option("--out", t_out, "CSV path or - for stdout");
  trace_cmd->add_option("--summary", t_summary,
                        "landing summary JSON path or - for stdout");

  auto* internal_cmd =
      app.add_subcommand("internal-ray", "internal ray to CSV");
  int i_branch = 0;
  std::vector<std::string> i_children;
  double i_height = 0.0, i_tstart = -4.0, i_tend = -0.02;
  std::string i_out = "-";
  internal_cmd->add_option("--branch", i_branch, "period-1 branch index");
  internal_cmd->add_option("--child", i_children,
                           "descend to the p/q child (repeatable)")
      ->allow_extra_args(false);
  internal_cmd->add_option("--height", i_height, "height h in [0,1)");
  internal_cmd->add_option("--tstart", i_tstart, "start potential (< 0)");
  internal_cmd->add_option("--tend", i_tend, "end potential (< 0)");
  internal_cmd->add_option("--out", i_out, "CSV path or - for stdout");

  auto* kneading_cmd =
      app.add_subcommand("kneading", "kneading sequence of an address");
  std::string k_addr;
  kneading_cmd->add_option("address", k_addr, "external address")->required();

  auto* components_cmd =
      app.add_subcommand("components", "census of hyperbolic components");
  int c_period = 1, c_boundary_steps = 0;
  std::string c_window, c_out = "-";
  double c_step = 0.0;
  std::vector<std::string> c_children;
  bool c_addresses = false;
  components_cmd->add_option("--period", c_period, "orbit period")->required();
  components_cmd->add_option("--window", c_window, "reLo:reHi:imLo:imHi")
      ->required();
  components_cmd->add_option("--step", c_step,
                             "census grid step (0 = config value)");
  components_cmd->add_option("--boundary-steps", c_boundary_steps,
                             "boundary samples per component (0 = skip)");
  components_cmd->add_option("--child", c_children,
                             "attach the p/q child to each record")
      ->allow_extra_args(false);
  components_cmd->add_flag("--addresses", c_addresses,
                           "assign intermediate addresses empirically");
  components_cmd->add_option("--out", c_out, "JSON path or - for stdout");

  auto* bif_cmd =
      app.add_subcommand("bifurcations", "children of one component");
  int b_branch = 0;
  std::vector<std::string> b_base, b_pqs;
  std::string b_out = "-";
  bif_cmd->add_option("--branch", b_branch, "period-1 branch index");
  bif_cmd->add_option("--base", b_base,
                      "descend the parent to the p/q child first")
      ->allow_extra_args(false);
  bif_cmd->add_option("--pq", b_pqs, "child rotation number p/q (repeatable)")
      ->required()
      ->allow_extra_args(false);
  bif_cmd->add_option("--out", b_out, "JSON path or - for stdout");

  auto* verify_cmd =
      app.add_subcommand("verify", "run the acceptance criteria");
  std::string v_out = "-";
  verify_cmd->add_option("--out", v_out, "report JSON path or - for stdout");

  for (CLI::App* sub : {render_cmd, trace_cmd, internal_cmd, kneading_cmd,
                        components_cmd, bif_cmd, verify_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Config cfg;
  try {
    cfg = Config::load_default();
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw UsageError("bad --set, expected key=value: " + kv);
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (render_cmd->parsed())
      return cmd_render(r_window, r_size, r_out, r_threads, r_rays, r_tmax,
                        r_tmin, r_internals, r_itstart, r_itend, cfg);
    if (trace_cmd->parsed())
      return cmd_trace_ray(t_addr, t_tmax, t_tmin, t_out, t_summary, cfg);
    if (internal_cmd->parsed())
      return cmd_internal_ray(i_branch, i_children, i_height, i_tstart,
                              i_tend, i_out, cfg);
    if (kneading_cmd->parsed()) return cmd_kneading(k_addr);
    if (components_cmd->parsed())
      return cmd_components(c_period, c_window, c_step, c_boundary_steps,
                            c_children, c_addresses, c_out, cfg);
    if (bif_cmd->parsed())
      return cmd_bifurcations(b_branch, b_base, b_pqs, b_out, cfg);
    if (verify_cmd->parsed()) return cmd_verify(v_out, cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

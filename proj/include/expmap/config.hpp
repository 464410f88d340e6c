#pragma once

// Flat key=value configuration shared by the library and the CLI.
//
// Sources, in increasing precedence: built-in defaults, the file named by
// the EXPMAP_CONFIG environment variable, an explicit config file, command
// line flags. Keys are namespaced by module, e.g. core.escapeRadius.

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace expmap {

struct Config {
  // core
  double escape_radius = 50.0;       // core.escapeRadius
  int escape_consecutive = 3;        // core.escapeConsecutive
  double overflow_re = 700.0;        // core.overflowRe
  int max_iter = 10000;              // core.maxIter
  double cycle_tol = 1e-6;           // core.cycleTol
  int newton_max_iter = 64;          // core.newtonMaxIter
  double newton_step_tol = 1e-12;    // core.newtonStepTol
  double degenerate_tol = 1e-8;      // core.degenerateTol
  double classify_tol = 1e-6;        // core.classifyTol  (|mu| bands; must
                                     // exceed degenerateTol or parabolics
                                     // refined to |mu-1| ~ degenerateTol
                                     // would never classify)

  // symbolic
  double ambiguous_strip_tol = 1e-3; // symbolic.ambiguousStripTol
  double prefix_error_budget = 25.0; // symbolic.prefixErrorBudget (log scale)
  double im_cap = 1e6;               // symbolic.imCap

  // rays
  double depth_escape = 50.0;        // rays.depthEscape
  int depth_cap = 200;               // rays.depthCap
  double grid_factor = 1.1;          // rays.gridFactor
  int fp_max_iter = 100;             // rays.fpMaxIter
  double fp_tol = 1e-11;             // rays.fpTol
  double branch_cut_tol = 1e-9;      // rays.branchCutTol
  int landing_samples = 8;           // rays.landingSamples
  double landing_spread_max = 1e-2;  // rays.landingSpreadMax
  double breakdown_step_factor = 10; // rays.breakdownStepFactor

  // components
  double cont_step = 0.05;           // components.contStep
  int cont_max_steps = 1000;         // components.contMaxSteps
  double dedup_tol = 1e-6;           // components.dedupTol
  double ray_stop_t = 1e-4;          // components.rayStopT
  double diverged_kappa = 1e6;       // components.divergedKappa

  // census
  double census_grid_step = 0.02;    // census.gridStep
  int census_max_iter = 4000;        // census.maxIter

  // render
  int period_cap = 8;                // render.periodCap
  int threads = 0;                   // render.threads (0 = hardware)

  void set(const std::string& key, const std::string& value);
  static Config load_default();                // defaults + EXPMAP_CONFIG
  void load_file(const std::string& path);     // key=value lines, # comments
};

inline void Config::set(const std::string& key, const std::string& value) {
  auto d = [&] { return std::stod(value); };
  auto i = [&] { return std::stoi(value); };
  if (key == "core.escapeRadius") escape_radius = d();
  else if (key == "core.escapeConsecutive") escape_consecutive = i();
  else if (key == "core.overflowRe") overflow_re = d();
  else if (key == "core.maxIter") max_iter = i();
  else if (key == "core.cycleTol") cycle_tol = d();
  else if (key == "core.newtonMaxIter") newton_max_iter = i();
  else if (key == "core.newtonStepTol") newton_step_tol = d();
  else if (key == "core.degenerateTol") degenerate_tol = d();
  else if (key == "core.classifyTol") classify_tol = d();
  else if (key == "symbolic.ambiguousStripTol") ambiguous_strip_tol = d();
  else if (key == "symbolic.prefixErrorBudget") prefix_error_budget = d();
  else if (key == "symbolic.imCap") im_cap = d();
  else if (key == "rays.depthEscape") depth_escape = d();
  else if (key == "rays.depthCap") depth_cap = i();
  else if (key == "rays.gridFactor") grid_factor = d();
  else if (key == "rays.fpMaxIter") fp_max_iter = i();
  else if (key == "rays.fpTol") fp_tol = d();
  else if (key == "rays.branchCutTol") branch_cut_tol = d();
  else if (key == "rays.landingSamples") landing_samples = i();
  else if (key == "rays.landingSpreadMax") landing_spread_max = d();
  else if (key == "rays.breakdownStepFactor") breakdown_step_factor = d();
  else if (key == "components.contStep") cont_step = d();
  else if (key == "components.contMaxSteps") cont_max_steps = i();
  else if (key == "components.dedupTol") dedup_tol = d();
  else if (key == "components.rayStopT") ray_stop_t = d();
  else if (key == "components.divergedKappa") diverged_kappa = d();
  else if (key == "census.gridStep") census_grid_step = d();
  else if (key == "census.maxIter") census_max_iter = i();
  else if (key == "render.periodCap") period_cap = i();
  else if (key == "render.threads") threads = i();
  else throw std::invalid_argument("unknown config key: " + key);
}

inline void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) set(key, value);
  }
}

inline Config Config::load_default() {
  Config cfg;
  if (const char* env = std::getenv("EXPMAP_CONFIG")) {
    if (*env) cfg.load_file(env);
  }
  return cfg;
}

}  // namespace expmap

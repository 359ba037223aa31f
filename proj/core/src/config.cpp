#include "bvpb/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bvpb {

std::string to_string(PresetKind k) {
  switch (k) {
    case PresetKind::rarefaction_stability: return "rarefaction_stability";
    case PresetKind::two_shock_stability: return "two_shock_stability";
    case PresetKind::neutrality_decay: return "neutrality_decay";
    case PresetKind::equilibrium_sanity: return "equilibrium_sanity";
  }
  return "?";
}

PresetKind preset_from_string(const std::string& s) {
  if (s == "rarefaction_stability") return PresetKind::rarefaction_stability;
  if (s == "two_shock_stability") return PresetKind::two_shock_stability;
  if (s == "neutrality_decay") return PresetKind::neutrality_decay;
  if (s == "equilibrium_sanity") return PresetKind::equilibrium_sanity;
  throw ConfigError("unknown preset '" + s +
                    "' (valid: rarefaction_stability, two_shock_stability, neutrality_decay, "
                    "equilibrium_sanity)");
}

namespace {

struct KeyValue {
  std::string section, key, value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<KeyValue> tokenize(const std::string& text) {
  std::vector<KeyValue> kvs;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) +
                                                ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    kvs.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  return kvs;
}

const std::map<std::string, std::set<std::string>>& valid_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"version"}},
      {"experiment", {"preset"}},
      {"far_field", {"rho_left", "u1_left", "theta_left"}},
      {"waves", {"delta_s1", "delta_s3", "boost_to_rest", "delta"}},
      {"perturbation",
       {"amplitude", "width", "center", "fields", "micro_noise", "seed", "f2_amplitude",
        "f2_width", "f2_center", "f2_zero_mean", "chapman_enskog_lift"}},
      {"space_grid", {"cells", "x_lo", "x_hi"}},
      {"velocity_grid", {"nodes", "halfwidth", "center_v1", "theta_ref"}},
      {"solver",
       {"cfl", "t_end", "reconstruction", "boundary", "nu0", "snapshot_every", "max_steps",
        "threads"}},
      {"output", {"diagnostics_level"}},
  };
  return keys;
}

double parse_double(const KeyValue& kv) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config line " + std::to_string(kv.line) + ": '" + kv.key +
                      "' expects a number, got '" + kv.value + "'");
  }
}

long parse_int(const KeyValue& kv) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config line " + std::to_string(kv.line) + ": '" + kv.key +
                      "' expects an integer, got '" + kv.value + "'");
  }
}

bool parse_bool(const KeyValue& kv) {
  if (kv.value == "true") return true;
  if (kv.value == "false") return false;
  throw ConfigError("config line " + std::to_string(kv.line) + ": '" + kv.key +
                    "' expects true/false, got '" + kv.value + "'");
}

void apply_pert_fields(ExperimentConfig& c) {
  auto& p = c.pert;
  p.in_rho = p.in_theta = p.in_u1 = false;
  if (c.pert_fields == "rho") p.in_rho = true;
  else if (c.pert_fields == "theta") p.in_theta = true;
  else if (c.pert_fields == "u1") p.in_u1 = true;
  else if (c.pert_fields == "rho_theta") p.in_rho = p.in_theta = true;
  else if (c.pert_fields == "all") p.in_rho = p.in_theta = p.in_u1 = true;
  else if (c.pert_fields == "none") {}
  else
    throw ConfigError("perturbation.fields: unknown value '" + c.pert_fields +
                      "' (valid: rho, theta, u1, rho_theta, all, none)");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  for (const KeyValue& kv : tokenize(text)) {
    const auto sec = valid_keys().find(kv.section);
    if (sec == valid_keys().end())
      throw ConfigError("config line " + std::to_string(kv.line) + ": unknown section [" +
                        kv.section + "]");
    if (!sec->second.count(kv.key)) {
      std::string valid;
      for (const auto& k : sec->second) valid += (valid.empty() ? "" : ", ") + k;
      throw ConfigError("config line " + std::to_string(kv.line) + ": unknown key '" + kv.key +
                        "' in [" + kv.section + "] (valid keys: " + valid + ")");
    }
    seen.insert(kv.section + "." + kv.key);

    if (kv.section.empty() && kv.key == "version") {
      c.version = int(parse_int(kv));
      if (c.version != 1)
        throw ConfigError("config: unsupported schema version " + std::to_string(c.version));
    } else if (kv.section == "experiment" && kv.key == "preset") {
      c.preset = preset_from_string(kv.value);
    } else if (kv.section == "far_field") {
      if (kv.key == "rho_left") c.rho_left = parse_double(kv);
      if (kv.key == "u1_left") c.u1_left = parse_double(kv);
      if (kv.key == "theta_left") c.theta_left = parse_double(kv);
    } else if (kv.section == "waves") {
      if (kv.key == "delta_s1") c.delta_s1 = parse_double(kv);
      if (kv.key == "delta_s3") c.delta_s3 = parse_double(kv);
      if (kv.key == "boost_to_rest") c.boost_to_rest = parse_bool(kv);
      if (kv.key == "delta") c.delta = parse_double(kv);
    } else if (kv.section == "perturbation") {
      if (kv.key == "amplitude") c.pert.amplitude = parse_double(kv);
      if (kv.key == "width") c.pert.width = parse_double(kv);
      if (kv.key == "center") c.pert.center = parse_double(kv);
      if (kv.key == "fields") c.pert_fields = kv.value;
      if (kv.key == "micro_noise") c.pert.micro_noise = parse_double(kv);
      if (kv.key == "seed") c.pert.seed = (unsigned long long)parse_int(kv);
      if (kv.key == "f2_amplitude") c.pert.f2_amplitude = parse_double(kv);
      if (kv.key == "f2_width") c.pert.f2_width = parse_double(kv);
      if (kv.key == "f2_center") c.pert.f2_center = parse_double(kv);
      if (kv.key == "f2_zero_mean") c.pert.f2_zero_mean = parse_bool(kv);
      if (kv.key == "chapman_enskog_lift") c.pert.chapman_enskog_lift = parse_bool(kv);
    } else if (kv.section == "space_grid") {
      if (kv.key == "cells") c.cells = int(parse_int(kv));
      if (kv.key == "x_lo") c.x_lo = parse_double(kv);
      if (kv.key == "x_hi") c.x_hi = parse_double(kv);
    } else if (kv.section == "velocity_grid") {
      if (kv.key == "nodes") c.v_nodes = int(parse_int(kv));
      if (kv.key == "halfwidth") c.v_halfwidth = parse_double(kv);
      if (kv.key == "center_v1") {
        if (kv.value != "auto") c.v_center1 = parse_double(kv);
      }
      if (kv.key == "theta_ref") {
        if (kv.value != "auto") c.v_theta_ref = parse_double(kv);
      }
    } else if (kv.section == "solver") {
      if (kv.key == "cfl") c.solver.cfl = parse_double(kv);
      if (kv.key == "t_end") c.solver.t_end = parse_double(kv);
      if (kv.key == "reconstruction") {
        if (kv.value == "upwind") c.solver.reconstruction = Reconstruction::upwind;
        else if (kv.value == "minmod") c.solver.reconstruction = Reconstruction::minmod;
        else throw ConfigError("solver.reconstruction: expected upwind or minmod");
      }
      if (kv.key == "boundary") {
        if (kv.value == "farfield") c.solver.boundary = BoundaryMode::farfield;
        else if (kv.value == "periodic") c.solver.boundary = BoundaryMode::periodic;
        else throw ConfigError("solver.boundary: expected farfield or periodic");
      }
      if (kv.key == "nu0") c.solver.nu0 = parse_double(kv);
      if (kv.key == "snapshot_every") c.solver.snapshot_every = int(parse_int(kv));
      if (kv.key == "max_steps") c.solver.max_steps = parse_int(kv);
      if (kv.key == "threads") c.solver.threads = int(parse_int(kv));
    } else if (kv.section == "output" && kv.key == "diagnostics_level") {
      if (kv.value == "light") c.diagnostics_level = DiagnosticsLevel::light;
      else if (kv.value == "full") c.diagnostics_level = DiagnosticsLevel::full;
      else throw ConfigError("output.diagnostics_level: expected light or full");
    }
  }

  // Log every default that was applied.
  for (const auto& [section, keys] : valid_keys())
    for (const auto& key : keys) {
      const std::string id = section + "." + key;
      if (!seen.count(id)) c.defaults_applied.push_back(id.substr(id.front() == '.' ? 1 : 0));
    }

  apply_pert_fields(c);
  c.solver.validate();
  if (c.cells < 4) throw ConfigError("space_grid.cells must be >= 4");
  if (c.x_hi <= c.x_lo) throw ConfigError("space_grid: x_hi must exceed x_lo");
  if (c.v_nodes < 4) throw ConfigError("velocity_grid.nodes must be >= 4");
  if (c.v_halfwidth <= 0) throw ConfigError("velocity_grid.halfwidth must be > 0");
  const FluidState left{c.rho_left, {c.u1_left, 0, 0}, c.theta_left};
  left.require_valid("config far_field");

  // Physical admissibility of the wave setup (errors cite the violated
  // condition via the wave constructors).
  if (c.preset == PresetKind::two_shock_stability) {
    const ShockData s1 = hugoniot_connect(left, 1, c.delta_s1);
    const ShockData s3 = hugoniot_connect(s1.right, 3, c.delta_s3);
    if (!s1.lax_strict() || !s3.lax_strict())
      throw ConfigError("two-shock preset: Lax entropy conditions violated");
    const double ratio = std::max(c.delta_s1, c.delta_s3) / std::min(c.delta_s1, c.delta_s3);
    if (ratio > 4.0)
      std::fprintf(stderr,
                   "warning: shock strengths not of the same order (ratio %.3g > 4)\n", ratio);
  } else if (c.preset == PresetKind::rarefaction_stability) {
    const FluidState right = rarefaction_right_state(left, c.delta);
    (void)right;  // throws if the curve construction fails
  }
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string ExperimentConfig::emit() const {
  char buf[512];
  std::string out;
  auto add = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  add("version = %d\n\n", version);
  add("[experiment]\npreset = %s\n\n", to_string(preset).c_str());
  add("[far_field]\nrho_left = %.17g\nu1_left = %.17g\ntheta_left = %.17g\n\n", rho_left,
      u1_left, theta_left);
  add("[waves]\ndelta_s1 = %.17g\ndelta_s3 = %.17g\nboost_to_rest = %s\ndelta = %.17g\n\n",
      delta_s1, delta_s3, boost_to_rest ? "true" : "false", delta);
  add("[perturbation]\namplitude = %.17g\nwidth = %.17g\ncenter = %.17g\nfields = %s\n",
      pert.amplitude, pert.width, pert.center, pert_fields.c_str());
  add("micro_noise = %.17g\nseed = %llu\nf2_amplitude = %.17g\nf2_width = %.17g\n",
      pert.micro_noise, pert.seed, pert.f2_amplitude, pert.f2_width);
  add("f2_center = %.17g\nf2_zero_mean = %s\nchapman_enskog_lift = %s\n\n", pert.f2_center,
      pert.f2_zero_mean ? "true" : "false", pert.chapman_enskog_lift ? "true" : "false");
  add("[space_grid]\ncells = %d\nx_lo = %.17g\nx_hi = %.17g\n\n", cells, x_lo, x_hi);
  add("[velocity_grid]\nnodes = %d\nhalfwidth = %.17g\n", v_nodes, v_halfwidth);
  if (v_center1) add("center_v1 = %.17g\n", *v_center1);
  else out += "center_v1 = auto\n";
  if (v_theta_ref) add("theta_ref = %.17g\n", *v_theta_ref);
  else out += "theta_ref = auto\n";
  out += "\n[solver]\n";
  add("cfl = %.17g\nt_end = %.17g\nreconstruction = %s\nboundary = %s\nnu0 = %.17g\n",
      solver.cfl, solver.t_end,
      solver.reconstruction == Reconstruction::upwind ? "upwind" : "minmod",
      solver.boundary == BoundaryMode::farfield ? "farfield" : "periodic", solver.nu0);
  add("snapshot_every = %d\nmax_steps = %ld\nthreads = %d\n\n", solver.snapshot_every,
      solver.max_steps, solver.threads);
  add("[output]\ndiagnostics_level = %s\n",
      diagnostics_level == DiagnosticsLevel::light ? "light" : "full");
  return out;
}

}  // namespace bvpb

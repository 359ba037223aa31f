#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bvpb/solver.hpp"

namespace bvpb {

enum class PresetKind {
  rarefaction_stability,
  two_shock_stability,
  neutrality_decay,
  equilibrium_sanity,
};

std::string to_string(PresetKind k);
PresetKind preset_from_string(const std::string& s);

enum class DiagnosticsLevel { light, full };

// Parsed, validated experiment configuration (sectioned key = value text,
// versioned; see docs/config.md). Units are nondimensional with R = 2/3.
struct ExperimentConfig {
  int version = 1;
  PresetKind preset = PresetKind::equilibrium_sanity;

  // [far_field] left/reference state
  double rho_left = 1.0;
  double u1_left = 0.0;
  double theta_left = 1.0;

  // [waves]
  double delta_s1 = 0.1;   // two-shock strengths
  double delta_s3 = 0.1;
  bool boost_to_rest = true;  // recenter so (s1+s3)/2 = 0
  double delta = 0.2;         // rarefaction strength

  // [perturbation]
  PerturbationSpec pert;
  std::string pert_fields = "rho_theta";  // rho | theta | u1 | rho_theta | all | none

  // [space_grid]
  int cells = 256;
  double x_lo = -40.0;
  double x_hi = 40.0;

  // [velocity_grid]
  int v_nodes = 24;
  double v_halfwidth = 6.0;
  std::optional<double> v_center1;   // auto: mean far-field u1
  std::optional<double> v_theta_ref; // auto: covers all far-field states

  // [solver]
  SolverConfig solver;

  // [output]
  DiagnosticsLevel diagnostics_level = DiagnosticsLevel::light;

  std::vector<std::string> defaults_applied;  // every defaulted key, logged

  // Normalized config text with every key explicit.
  std::string emit() const;
};

// Parses and fully validates (schema + physical admissibility: R-H/Lax for
// shocks, R3 connectivity for rarefactions). Unknown keys are hard errors
// listing the valid keys of the section.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Built-in defaults per preset (the acceptance presets).
ExperimentConfig default_config(PresetKind kind);

// --- materialized experiment -------------------------------------------------

struct MaterializedExperiment {
  ExperimentConfig cfg;
  SpaceGrid space;
  VelocityGrid velocity;
  CollisionModel model;
  WaveKind kind = WaveKind::constant;
  WaveAnsatz ansatz0;  // at t = 0; two-shock shifts/diffusion start at zero
  PerturbationSpec pert;
  std::vector<FluidState> far_states;  // reference band inputs
};

// Builds grids, the collision model, wave objects (including the NS shock
// profiles) and the t=0 ansatz from a validated config.
MaterializedExperiment materialize(const ExperimentConfig& cfg);

// Uniform background helper.
WaveAnsatz constant_ansatz(const FluidState& state, const SpaceGrid& grid);

}  // namespace bvpb

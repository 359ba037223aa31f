#pragma once

#include <vector>

#include "bvpb/collision.hpp"
#include "bvpb/field_poisson.hpp"
#include "bvpb/phase_space.hpp"
#include "bvpb/wave_patterns.hpp"

namespace bvpb {

enum class Reconstruction { upwind, minmod };
enum class BoundaryMode { farfield, periodic };

struct SolverConfig {
  double cfl = 0.5;
  double t_end = 1.0;
  Reconstruction reconstruction = Reconstruction::upwind;
  BoundaryMode boundary = BoundaryMode::farfield;
  double nu0 = 1.0;
  int snapshot_every = 20;
  long max_steps = 1000000000L;
  int threads = 0;  // 0 = runtime default

  void validate() const;
};

// Accumulated boundary bookkeeping so conservation can be audited on the
// truncated domain: totals(t) - totals(0) + outflow == 0 up to scheme error.
struct BoundaryFluxTotals {
  double mass = 0.0;
  double mom1 = 0.0;
  double energy = 0.0;
  double n2 = 0.0;
  double field_work = 0.0;  // accumulated dt ([Pi_x^2/4]_R - [Pi_x^2/4]_L)
};

struct ConservationTotals {
  double mass = 0.0, mom1 = 0.0, energy_kinetic = 0.0, energy_field = 0.0, n2 = 0.0;
  double energy_total() const { return energy_kinetic + energy_field; }
};

struct SimulationState {
  DistributionField field;
  ElectricField efield;
  std::vector<FluidState> cell_states;  // consistent with field after each step
  std::vector<double> n2;
  long step = 0;
  double dt_last = 0.0;
  double clipped_v1_flux = 0.0;  // logged conservation repair at the v1 box edge
  BoundaryFluxTotals outflow;
  // Far-field pinned ghost blocks (discrete Maxwellians; F2 ghost = 0).
  std::vector<double> ghost_left_f1, ghost_right_f1;

  double time() const { return field.time; }
};

struct PerturbationSpec {
  double amplitude = 0.0;  // relative Gaussian bump on the macro fields
  double width = 1.0;
  double center = 0.0;
  bool in_rho = true;
  bool in_u1 = false;
  bool in_theta = true;
  double micro_noise = 0.0;  // P1-range noise amplitude (relative to local M)
  unsigned long long seed = 1;
  double f2_amplitude = 0.0;  // n2 seed profile = f2_amplitude * gaussian
  double f2_width = 1.0;
  double f2_center = 0.0;
  bool f2_zero_mean = true;
  bool chapman_enskog_lift = false;  // seed micro part with L_M^{-1}[P1(v1 M_x)]
};

class KineticSolver {
 public:
  KineticSolver(SpaceGrid space, VelocityGrid velocity, CollisionModel model,
                SolverConfig config);

  const SpaceGrid& space() const { return space_; }
  const VelocityGrid& velocity() const { return vel_; }
  const CollisionModel& model() const { return model_; }
  const SolverConfig& config() const { return cfg_; }

  // F1 = discrete Maxwellian of (ansatz + perturbation) [+ micro seeds],
  // F2 = (n2seed/rho) Mhat; field solved; ghosts pinned to the unperturbed
  // boundary-cell states.
  SimulationState initialize(const WaveAnsatz& ansatz, const PerturbationSpec& pert) const;

  // CFL-limited time step proposal from the current state.
  double propose_dt(const SimulationState& s) const;

  // One Strang step T(dt/2) A(dt/2) C(dt) A(dt/2) T(dt/2); the field is
  // re-solved after each transport half (the stages that change n2).
  // Returns the dt actually taken (<= dt_cap).
  double step(SimulationState& s, double dt_cap) const;

  ConservationTotals totals(const SimulationState& s) const;

 private:
  void transport_half(SimulationState& s, double dt, bool collect_moments) const;
  void advect_v1(SimulationState& s, double dt) const;
  void collide(SimulationState& s, double dt) const;
  void refresh_field(SimulationState& s) const;
  void refresh_moment_cache(SimulationState& s) const;
  const double* row(const Tensor4& t, const SimulationState& s, bool is_f1, int x) const;

  SpaceGrid space_;
  VelocityGrid vel_;
  CollisionModel model_;
  SolverConfig cfg_;
  std::vector<double> v1_flat_;  // per-node v1, flattened block order
  std::vector<double> zero_block_;
  mutable Tensor4 scratch_;  // transport double buffer, reused across steps
};

}  // namespace bvpb

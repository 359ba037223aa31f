#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bvpb/collision.hpp"
#include "bvpb/euler.hpp"
#include "bvpb/phase_space.hpp"

namespace bvpb {

// Primitive values plus x-derivatives at one point of a background wave.
struct WaveSample {
  double rho = 0.0, u1 = 0.0, theta = 0.0;
  double rho_x = 0.0, u1_x = 0.0, theta_x = 0.0;
  double m1() const { return rho * u1; }
  double E() const { return rho * (theta + 0.5 * u1 * u1); }
};

// Navier-Stokes viscous shock profile in xi = x - s t: the traveling-wave
// two-point connection solved by shooting from the saddle along its
// unstable direction, with exponential far-field closure on the launch side
// and constant clamp once the node is reached to 1e-14.
class ShockProfile {
 public:
  static ShockProfile solve(const ShockData& shock, const CollisionModel& model);

  WaveSample eval(double xi) const;
  const ShockData& shock() const { return shock_; }
  // lambda_i(profile) at xi; strictly decreasing across the wave.
  double lambda_i(double xi) const;
  // Fitted exponential tail rates (launch side, node side).
  double tail_rate_saddle() const { return tail_rate_saddle_; }
  double tail_rate_node() const { return tail_rate_node_; }
  double xi_min() const { return xi_.front(); }
  double xi_max() const { return xi_.back(); }

 private:
  ShockData shock_;
  FluidState far_left_, far_right_;  // ODE rest points (R-H states to ~1e-12)
  double j_ = 0.0;
  bool saddle_on_left_ = true;
  double tail_rate_saddle_ = 0.0, tail_rate_node_ = 0.0;
  // Sample table, increasing xi, with exact ODE slopes for Hermite eval.
  std::vector<double> xi_, u_, th_, up_, thp_;
};

// Linear diffusion wave Theta(x,t) = alpha2 / sqrt(4 pi a (1+t))
// exp(-(x - u1# t)^2 / (4 a (1+t))), a = 3 kappa(theta#) / (5 rho#).
struct DiffusionWave {
  double alpha2 = 0.0;
  double a = 0.0;
  double u1_sharp = 0.0;

  static DiffusionWave make(double alpha2, const FluidState& sharp, const CollisionModel& model);

  double theta(double x, double t) const;
  double theta_x(double x, double t) const;
  double theta_xx(double x, double t) const;
  double theta_t(double x, double t) const;
  // Theta_t + u1# Theta_x - a Theta_xx, analytically zero.
  double heat_residual(double x, double t) const;
};

enum class WaveKind { two_shock, rarefaction, constant };

struct TwoShockMeta {
  ShockData s1;
  ShockData s3;
  FluidState sharp;  // intermediate state
  DiffusionWave diffusion;
  std::shared_ptr<const ShockProfile> prof1;
  std::shared_ptr<const ShockProfile> prof3;
};

struct RarefactionMeta {
  FluidState left, right;
  BurgersExact burgers;
  double sigma1 = 0.0;  // common 3-Riemann invariant u1 - sqrt(10 theta)
  double entropy = 0.0;
};

// Composite background profile sampled on the space grid at one time.
struct WaveAnsatz {
  WaveKind kind = WaveKind::rarefaction;
  double time = 0.0;
  std::vector<double> rho, m1, E;        // conserved fields
  std::vector<double> u1, theta;         // primitive fields
  std::vector<double> rho_x, u1_x, theta_x;
  std::optional<TwoShockMeta> two_shock;
  std::optional<RarefactionMeta> rarefaction;

  WaveSample sample(int cell) const {
    return {rho[cell], u1[cell], theta[cell], rho_x[cell], u1_x[cell], theta_x[cell]};
  }
  FluidState state(int cell) const {
    return {rho[cell], {u1[cell], 0.0, 0.0}, theta[cell]};
  }
  // CSV columns (x, rho, m1, E, u1, theta), 17 significant digits.
  void export_csv(const SpaceGrid& grid, const std::string& path) const;
};

// Approximate 3-rarefaction: the two states must lie on one R3 curve
// (equal invariants, lambda_3 increasing), else a construction error
// reporting the violated invariant is thrown. Samples at Burgers time 1+t.
WaveAnsatz rarefaction_ansatz(const FluidState& left, const FluidState& right,
                              const SpaceGrid& grid, double t);
// Pointwise version.
WaveSample rarefaction_sample(const RarefactionMeta& meta, double x, double t);

// Builds the far-field pair of a 3-rarefaction of prescribed strength
// delta = |d rho| + |d u1| + |d theta| starting from `left`.
FluidState rarefaction_right_state(const FluidState& left, double delta);

// Mass decomposition of the initial excess onto (r1, r2, r3);
// r2 = (1, u1#, u1#^2/2)^t. Throws NumericsError when the directions are
// nearly collinear (conditioning).
std::array<double, 3> decompose_initial_mass(const std::array<double, 3>& excess,
                                             const ShockData& s1, const ShockData& s3,
                                             double u1_sharp);

// Shifted composite two-shock ansatz with linear and coupled diffusion waves:
//   rho~ = rho^{S1}(x-s1 t+a1) + rho^{S3}(x-s3 t+a3) - rho# + Theta,
//   m1~  = m1^{S1} + m1^{S3} - m1# + u1# Theta - a Theta_x,
//   E~   = E^{S1} + E^{S3} - E# + u1#^2/2 Theta - a u1# Theta_x.
// Shifts are taken from s1.shift / s3.shift.
WaveAnsatz composite_ansatz(const TwoShockMeta& meta, const SpaceGrid& grid, double t);

// Microscopic Chapman-Enskog correction for smooth backgrounds:
//   Gbar = (3/(2 theta)) L_M^{-1}[ P1( v1 ( |v-u|^2/(2 theta) theta_x
//          + v1 u1_x ) M ) ],
// returned P1-projected so adding it leaves the cell moments unchanged.
void correction_g_bar_cell(const WaveSample& bg, const ChiBasis& basis,
                           const CollisionModel& model, const VelocityGrid& grid,
                           std::span<double> out);

}  // namespace bvpb

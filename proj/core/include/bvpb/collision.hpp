#pragma once

#include <array>
#include <span>
#include <vector>

#include "bvpb/maxwellian.hpp"
#include "bvpb/phase_space.hpp"

namespace bvpb {

enum class CollisionMode { bgk, hard_sphere_oracle };

// BGK-structured collision model with nu = nu0 * rho (velocity independent),
// so L_M^{-1}, N_M^{-1} are closed-form and mu, kappa, kappa1 depend on theta
// alone. The hard-sphere frequency nu(|v|) ~ (1+|v|) lives only in the
// quadrature oracle.
struct CollisionModel {
  CollisionMode mode = CollisionMode::bgk;
  double nu0 = 1.0;
  // Dissipativity constants, measured (Rayleigh quotients), not assumed.
  double sigma1_measured = 0.0;
  double sigma2_measured = 0.0;

  double nu(double rho) const { return nu0 * rho; }

  // Closed-form BGK Chapman-Enskog coefficients (functions of theta only).
  double mu_of_theta(double theta) const { return kGasConstant * theta / nu0; }
  double kappa_of_theta(double theta) const {
    return 2.5 * kGasConstant * kGasConstant * theta / nu0;
  }
  double kappa1_of_theta(double theta) const { return kGasConstant * theta / nu0; }
};

struct TransportCoefficients {
  double mu = 0.0;
  double kappa = 0.0;
  double kappa1 = 0.0;
};

// L_M g = -nu P1 g (bgk): null space exactly span(chi_0..chi_4).
void apply_L_M(std::span<const double> g, const ChiBasis& basis, const CollisionModel& model,
               const VelocityGrid& grid, std::span<double> out);
// N_M h = -nu P_c h (bgk): null space exactly span(M).
void apply_N_M(std::span<const double> h, const ChiBasis& basis, const CollisionModel& model,
               const VelocityGrid& grid, std::span<double> out);

// Inverses on the microscopic subspaces (multiplication by -1/nu). Inputs
// must already be microscopic to 1e-8 in the weighted norm, else a
// projection-violation NumericsError is thrown.
void invert_L_M(std::span<const double> g_perp, const ChiBasis& basis,
                const CollisionModel& model, const VelocityGrid& grid, std::span<double> out);
void invert_N_M(std::span<const double> h_perp, const ChiBasis& basis,
                const CollisionModel& model, const VelocityGrid& grid, std::span<double> out);

// Discrete Maxwellian exp(a + b.v - c|v|^2) whose *discrete* moments match
// the targets exactly (Newton on the 5 shadow parameters).
class DiscreteMaxwellian {
 public:
  // Newton-solve so that grid moments match `target` to `tol` (relative),
  // at most `max_iter` iterations; throws NumericsError on nonconvergence.
  static DiscreteMaxwellian match(const RawMoments& target, const VelocityGrid& grid,
                                  double tol = 1e-13, int max_iter = 30);

  void eval_into(std::span<double> out, const VelocityGrid& grid) const;
  std::vector<double> eval(const VelocityGrid& grid) const;
  const std::array<double, 5>& params() const { return params_; }  // (a, b1, b2, b3, c)
  int iterations() const { return iters_; }

 private:
  std::array<double, 5> params_{};
  int iters_ = 0;
};

// Exact exponential BGK relaxation of one cell:
//   F1' = Mhat + e^{-nu dt} (F1 - Mhat),
//   F2' = (n2/rho) Mhat + e^{-nu dt} P_c F2,
// with Mhat the discrete Maxwellian matched to F1's discrete moments. The
// five F1-moments and int F2 dv are conserved to the Newton tolerance.
// Returns the cell's post-step fluid state.
FluidState relax_step_cell(std::span<double> f1_cell, std::span<double> f2_cell,
                           const VelocityGrid& grid, const CollisionModel& model, double dt);

// Transport coefficients by the defining velocity integrals, using
// invert_L_M / invert_N_M on the grid (the dual route to the closed forms).
TransportCoefficients transport_coefficients(const FluidState& state, const VelocityGrid& grid,
                                             const CollisionModel& model);

// Direct hard-sphere quadrature oracle for Q(f,g) on tiny grids
// (node_count <= 12^3, cost O(N^2 N_Omega)). Gain term in deposit form with
// a triquadratic stencil; pairs whose post-collision stencils leave the box
// are dropped symmetrically, so xi-moments of Q(f,g)+Q(g,f) vanish to
// roundoff. Test oracle only.
std::vector<double> hard_sphere_q_oracle(std::span<const double> f, std::span<const double> g,
                                         const VelocityGrid& grid);

// Linearized hard-sphere operator via the oracle: 2Q(M,g) + 2Q(g,M).
std::vector<double> hard_sphere_L_M(std::span<const double> g, std::span<const double> m_field,
                                    const VelocityGrid& grid);

}  // namespace bvpb

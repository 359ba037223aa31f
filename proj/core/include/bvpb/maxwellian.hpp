#pragma once

#include <array>
#include <span>
#include <vector>

#include "bvpb/phase_space.hpp"

namespace bvpb {

// Local Maxwellian M_[rho,u,theta](v) sampled on the grid, R = 2/3.
std::vector<double> maxwellian(const FluidState& state, const VelocityGrid& grid);
// Peak value rho (3/(4 pi theta))^{3/2} at v = u.
double maxwellian_peak(const FluidState& state);

// Separable factorization M = prefac * a1[i] a2[j] a3[k]; used by the hot
// kernels so a full tensor evaluation costs one multiply per node.
struct MaxwellianFactors {
  double prefac = 0.0;
  std::array<std::vector<double>, 3> axis;  // exp(-(v-u_a)^2 / (2 R theta)) per axis
  void eval_into(std::span<double> out, const VelocityGrid& grid) const;
};
MaxwellianFactors maxwellian_factors(const FluidState& state, const VelocityGrid& grid);

// <g1, g2>_Mtilde = sum g1 g2 / Mtilde * w. Throws NumericsError if the
// weighted sum overflows (support far outside the weight's core).
double inner_product(std::span<const double> g1, std::span<const double> g2,
                     std::span<const double> weight_maxwellian, const VelocityGrid& grid);
// Exact-match overload so unqualified calls on vectors do not fall into
// std::inner_product via ADL.
inline double inner_product(const std::vector<double>& g1, const std::vector<double>& g2,
                            const std::vector<double>& wm, const VelocityGrid& grid) {
  return inner_product(std::span<const double>(g1), std::span<const double>(g2),
                       std::span<const double>(wm), grid);
}

// Orthonormal basis of the macroscopic subspace at one fluid state.
//
// `analytic` holds the closed-form chi_j (orthonormal only up to quadrature
// error; used to test quadrature fidelity). `ortho` is the Gram-Schmidt
// re-orthonormalization on the discrete grid against the same Maxwellian
// field, so projections annihilate moments to roundoff.
class ChiBasis {
 public:
  static ChiBasis build(const FluidState& state, std::span<const double> m_field,
                        const VelocityGrid& grid);
  // Convenience: samples the analytic Maxwellian itself.
  static ChiBasis build(const FluidState& state, const VelocityGrid& grid);

  const std::vector<double>& analytic_chi(int j) const { return analytic_[j]; }
  const std::vector<double>& chi(int j) const { return ortho_[j]; }
  const std::vector<double>& m_field() const { return m_; }
  const FluidState& state() const { return state_; }

  // P0 g = sum_j <g, chi_j> chi_j ; P1 g = g - P0 g.
  void project_P0(std::span<const double> g, std::span<double> out, const VelocityGrid& grid) const;
  void project_P1(std::span<const double> g, std::span<double> out, const VelocityGrid& grid) const;

  // P_d g = <g, M> M / rho = (int g dv) M / rho ; P_c g = g - P_d g.
  void project_Pd(std::span<const double> g, std::span<double> out, const VelocityGrid& grid) const;
  void project_Pc(std::span<const double> g, std::span<double> out, const VelocityGrid& grid) const;

 private:
  FluidState state_;
  std::vector<double> m_;
  std::array<std::vector<double>, 5> analytic_;
  std::array<std::vector<double>, 5> ortho_;
};

// Global reference Maxwellian M* with theta* strictly inside
// (max theta / 2, min theta); weights all micro norms.
struct GlobalReference {
  FluidState star;
  double eta0 = 0.5;

  // Per-node 1/M*(v) weights.
  std::vector<double> inv_mstar(const VelocityGrid& grid) const;
  // Band check against a sampled run state.
  bool band_ok(double theta) const { return 0.5 * theta < star.theta && star.theta < theta; }
  bool closeness_ok(const FluidState& s) const;
};

// theta* = 0.75 min(theta) clamped into the open band (max theta/2, min theta)
// with a 5% inset; rho* = mean rho, u* = mean u. Throws PhysicsError when the
// band is empty ("wave too strong for single reference").
GlobalReference select_global_reference(std::span<const FluidState> states, double eta0 = 0.5);

}  // namespace bvpb

#pragma once

#include <array>

#include "bvpb/fluid_state.hpp"

namespace bvpb {

// Sound speed of the R = 2/3, gamma = 5/3 gas: sqrt(10 theta)/3.
inline double sound_speed(double theta) { return std::sqrt(10.0 * theta) / 3.0; }

// Characteristic speeds lambda_1 = u1 - c, lambda_2 = u1, lambda_3 = u1 + c.
std::array<double, 3> euler_eigenvalues(const FluidState& s);

// Eigen-structure of the quasilinear coefficient matrix A1 for the
// (density, velocity-like, temperature-like) perturbation variables:
//   A1 = [[u1, rho, 0], [2 theta/(3 rho), u1, 2/3], [0, (2/3) theta, u1]].
// L rows and R columns satisfy L R = Id and L A1 R = diag(lambda).
struct EulerEigenSystem {
  FluidState state;
  std::array<double, 3> lambda{};
  std::array<std::array<double, 3>, 3> L{};   // rows l_1, l_2, l_3
  std::array<std::array<double, 3>, 3> R{};   // columns r_1, r_2, r_3 (stored row-major)
  std::array<std::array<double, 3>, 3> A1{};
};

EulerEigenSystem eigen_system(const FluidState& state);

// i-Riemann invariants (i = 1 or 3): Sigma^(1) = u1 -+ sqrt(10 theta)
// (closed form of u1 + (-1)^{(i-1)/2} int sqrt(p_z)/z dz for p = k rho^{5/3} e^S),
// Sigma^(2) = S.
std::array<double, 2> riemann_invariants(const FluidState& s, int family);

// Shock connection data for one Lax shock.
struct ShockData {
  int family = 1;            // 1-shock or 3-shock
  FluidState left;           // state on the x-left side of the wave
  FluidState right;          // state on the x-right side
  double speed = 0.0;
  double strength = 0.0;     // |d rho| + |d m1| + |d E|
  double shift = 0.0;        // alpha_i, argument translation x - s t + alpha
  double mass_flux = 0.0;    // j = rho (u1 - s), same on both sides

  std::array<double, 3> rh_residuals() const;
  bool lax_strict() const;
};

// Connects `left` across an i-shock of prescribed strength
// delta = |d rho| + |d m1| + |d E|, solving the Rankine-Hugoniot conditions
// by Newton (closed-form Hugoniot initial guess) and verifying the strict Lax
// inequalities. For family 1 `left` is the upstream (-) state; for family 3
// `left` is the downstream (#) state. strength = 0 returns the degenerate
// shock with speed lambda_i(left).
ShockData hugoniot_connect(const FluidState& left, int family, double strength);

// Smoothed Burgers data: w0(x) = (w+ + w-)/2 + (w+ - w-)/2 tanh(x),
// w(t,x) = w0(x0) with x = x0 + w0(x0) t resolved by safeguarded Newton.
struct BurgersExact {
  double w_minus = 0.0;
  double w_plus = 0.0;

  struct Value {
    double w = 0.0;
    double wx = 0.0;
    double wxx = 0.0;
    double x0 = 0.0;
  };
  Value eval(double x, double t) const;  // requires w- < w+ and t >= 0
};

}  // namespace bvpb

#pragma once

#include <array>
#include <cmath>

#include "bvpb/errors.hpp"

namespace bvpb {

// Gas constant is fixed to 2/3 throughout, so e = theta and p = (2/3) rho theta.
inline constexpr double kGasConstant = 2.0 / 3.0;
// Polytropic constant in p = k rho^{5/3} exp(S).
inline const double kEntropyConst = 1.0 / (2.0 * M_PI * M_E);

struct FluidState {
  double rho = 1.0;
  std::array<double, 3> u = {0.0, 0.0, 0.0};
  double theta = 1.0;

  double pressure() const { return kGasConstant * rho * theta; }
  double internal_energy() const { return theta; }
  double entropy() const {
    return -2.0 / 3.0 * std::log(rho) + std::log(4.0 * M_PI / 3.0 * theta) + 1.0;
  }
  double speed_sq() const { return u[0] * u[0] + u[1] * u[1] + u[2] * u[2]; }
  // Conserved total energy density E = rho (theta + |u|^2/2).
  double total_energy() const { return rho * (theta + 0.5 * speed_sq()); }
  double momentum1() const { return rho * u[0]; }

  bool valid() const {
    return rho > 0.0 && theta > 0.0 && std::isfinite(rho) && std::isfinite(theta) &&
           std::isfinite(u[0]) && std::isfinite(u[1]) && std::isfinite(u[2]);
  }
  void require_valid(const char* who) const {
    if (!valid()) {
      throw PhysicsError(std::string(who) + ": invalid fluid state (rho=" +
                         std::to_string(rho) + ", theta=" + std::to_string(theta) + ")");
    }
  }
};

// Conserved triple (rho, m1, E) used by the wave machinery.
struct Conserved3 {
  double rho = 0.0;
  double m1 = 0.0;
  double E = 0.0;
};

inline Conserved3 to_conserved(const FluidState& s) {
  return {s.rho, s.momentum1(), s.total_energy()};
}

inline FluidState from_conserved1d(const Conserved3& c) {
  if (c.rho <= 0.0) throw PhysicsError("from_conserved1d: rho <= 0");
  FluidState s;
  s.rho = c.rho;
  s.u = {c.m1 / c.rho, 0.0, 0.0};
  s.theta = c.E / c.rho - 0.5 * s.u[0] * s.u[0];
  if (s.theta <= 0.0) throw PhysicsError("from_conserved1d: theta <= 0");
  return s;
}

}  // namespace bvpb

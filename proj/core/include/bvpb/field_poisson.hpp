#pragma once

#include <vector>

#include "bvpb/phase_space.hpp"

namespace bvpb {

// Electric field Pi_x from d_xx Pi = 2 n2 under the symmetric far-field
// gauge: Pi_x(x) = int_{x_lo}^x 2 n2 dy - Q_tot/2, so both endpoints carry
// the residual |Q_tot|/2 when the domain is not exactly neutral.
struct ElectricField {
  std::vector<double> pi_x;     // at cell centers
  double q_tot = 0.0;           // int 2 n2 dx
  bool neutrality_warning = false;

  double max_abs() const;
  // int Pi_x^2/4 dx by midpoint rule.
  double energy(const SpaceGrid& grid) const;
  std::vector<double> energy_density() const;  // Pi_x^2/4 samples
};

// Far-field gauge solve; |Q_tot| > tol sets the neutrality warning flag.
ElectricField solve_field(std::span<const double> n2, const SpaceGrid& grid,
                          double neutrality_tol = 1e-10);

// Periodic variant: zero-mean projection of n2, zero-mean gauge for Pi_x.
ElectricField solve_field_periodic(std::span<const double> n2, const SpaceGrid& grid);

// Cumulative integral with the same symmetric gauge, used for the
// anti-derivative perturbation variables.
std::vector<double> symmetric_antiderivative(std::span<const double> f, const SpaceGrid& grid);

}  // namespace bvpb

#include "bvpb/field_poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bvpb {

double ElectricField::max_abs() const {
  double m = 0.0;
  for (double v : pi_x) m = std::max(m, std::abs(v));
  return m;
}

double ElectricField::energy(const SpaceGrid& grid) const {
  double s = 0.0;
  for (double v : pi_x) s += v * v;
  return 0.25 * s * grid.dx;
}

std::vector<double> ElectricField::energy_density() const {
  std::vector<double> e(pi_x.size());
  for (std::size_t i = 0; i < pi_x.size(); ++i) e[i] = 0.25 * pi_x[i] * pi_x[i];
  return e;
}

// Midpoint-rule prefix sums at the cell edges, averaged back to centers.
static std::vector<double> center_prefix(std::span<const double> f, double dx, double* total) {
  const int n = int(f.size());
  std::vector<double> out(n);
  double edge = 0.0;  // running integral at the left edge of cell i
  for (int i = 0; i < n; ++i) {
    out[i] = edge + 0.5 * f[i] * dx;  // value at the cell center
    edge += f[i] * dx;
  }
  if (total) *total = edge;
  return out;
}

ElectricField solve_field(std::span<const double> n2, const SpaceGrid& grid,
                          double neutrality_tol) {
  if (int(n2.size()) != grid.cells) throw NumericsError("solve_field: n2 size mismatch");
  ElectricField ef;
  std::vector<double> two_n2(n2.size());
  for (std::size_t i = 0; i < n2.size(); ++i) two_n2[i] = 2.0 * n2[i];
  ef.pi_x = center_prefix(two_n2, grid.dx, &ef.q_tot);
  for (auto& v : ef.pi_x) v -= 0.5 * ef.q_tot;
  ef.neutrality_warning = std::abs(ef.q_tot) > neutrality_tol;
  return ef;
}

ElectricField solve_field_periodic(std::span<const double> n2, const SpaceGrid& grid) {
  if (int(n2.size()) != grid.cells) throw NumericsError("solve_field_periodic: n2 size mismatch");
  const double mean = std::accumulate(n2.begin(), n2.end(), 0.0) / n2.size();
  std::vector<double> two_n2(n2.size());
  for (std::size_t i = 0; i < n2.size(); ++i) two_n2[i] = 2.0 * (n2[i] - mean);
  ElectricField ef;
  double qtot = 0.0;
  ef.pi_x = center_prefix(two_n2, grid.dx, &qtot);
  const double pmean =
      std::accumulate(ef.pi_x.begin(), ef.pi_x.end(), 0.0) / double(ef.pi_x.size());
  for (auto& v : ef.pi_x) v -= pmean;
  ef.q_tot = 0.0;  // neutral by projection
  return ef;
}

std::vector<double> symmetric_antiderivative(std::span<const double> f, const SpaceGrid& grid) {
  if (int(f.size()) != grid.cells)
    throw NumericsError("symmetric_antiderivative: size mismatch");
  double total = 0.0;
  std::vector<double> out = center_prefix(f, grid.dx, &total);
  for (auto& v : out) v -= 0.5 * total;
  return out;
}

}  // namespace bvpb

#include "bvpb/phase_space.hpp"

#include <algorithm>
#include <cmath>

namespace bvpb {

static VelocityAxis make_axis(int count, double center, double halfwidth) {
  if (count < 2) throw ConfigError("velocity axis needs at least 2 nodes");
  VelocityAxis ax;
  ax.count = count;
  ax.center = center;
  ax.halfwidth = halfwidth;
  ax.dv = 2.0 * halfwidth / (count - 1);
  ax.nodes.resize(count);
  ax.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    // Symmetric construction: node(i) = -node(count-1-i) relative to center.
    ax.nodes[i] = center + (i - 0.5 * (count - 1)) * ax.dv;
    ax.weights[i] = (i == 0 || i == count - 1) ? 0.5 * ax.dv : ax.dv;
  }
  return ax;
}

VelocityGrid VelocityGrid::make(std::array<int, 3> counts, double halfwidth_thermal,
                                std::array<double, 3> center, double theta_ref) {
  if (theta_ref <= 0.0) throw ConfigError("VelocityGrid: theta_ref must be > 0");
  const double hw = halfwidth_thermal * std::sqrt(kGasConstant * theta_ref);
  VelocityGrid g;
  for (int a = 0; a < 3; ++a) g.axes_[a] = make_axis(counts[a], center[a], hw);
  g.flat_w_.resize(g.node_count());
  for (int i = 0; i < counts[0]; ++i)
    for (int j = 0; j < counts[1]; ++j)
      for (int k = 0; k < counts[2]; ++k) g.flat_w_[g.index(i, j, k)] = g.weight(i, j, k);
  return g;
}

VelocityGrid VelocityGrid::make_cubic(int n, double halfwidth_thermal,
                                      std::array<double, 3> center, double theta_ref) {
  return make({n, n, n}, halfwidth_thermal, center, theta_ref);
}

double VelocityGrid::box_volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= 2.0 * ax.halfwidth;
  return v;
}

double VelocityGrid::max_speed1() const {
  return std::max(std::abs(axes_[0].nodes.front()), std::abs(axes_[0].nodes.back()));
}

SpaceGrid SpaceGrid::make(int cells, double x_lo, double x_hi, bool periodic) {
  if (cells < 1 || x_hi <= x_lo) throw ConfigError("SpaceGrid: need cells >= 1 and x_hi > x_lo");
  SpaceGrid g;
  g.cells = cells;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.dx = (x_hi - x_lo) / cells;
  g.periodic = periodic;
  return g;
}

double integrate_velocity(std::span<const double> f, const VelocityGrid& grid) {
  if (f.size() != grid.node_count())
    throw NumericsError("integrate_velocity: node count mismatch");
  const auto& w = grid.flat_weights();
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) s += f[n] * w[n];
  return s;
}

RawMoments raw_moments(std::span<const double> f, const VelocityGrid& grid) {
  if (f.size() != grid.node_count()) throw NumericsError("raw_moments: node count mismatch");
  const auto& a1 = grid.axis(0);
  const auto& a2 = grid.axis(1);
  const auto& a3 = grid.axis(2);
  RawMoments m;
  std::size_t n = 0;
  for (int i = 0; i < a1.count; ++i) {
    const double v1 = a1.nodes[i], w1 = a1.weights[i];
    for (int j = 0; j < a2.count; ++j) {
      const double v2 = a2.nodes[j], w12 = w1 * a2.weights[j];
      // Inner-axis partial sums: sum f, sum f*v3, sum f*v3^2.
      double s0 = 0.0, s1 = 0.0, s2 = 0.0;
      for (int k = 0; k < a3.count; ++k, ++n) {
        const double fv = f[n] * a3.weights[k];
        s0 += fv;
        s1 += fv * a3.nodes[k];
        s2 += fv * a3.nodes[k] * a3.nodes[k];
      }
      m.rho += w12 * s0;
      m.mom[0] += w12 * v1 * s0;
      m.mom[1] += w12 * v2 * s0;
      m.mom[2] += w12 * s1;
      m.energy += w12 * (0.5 * (v1 * v1 + v2 * v2) * s0 + 0.5 * s2);
    }
  }
  return m;
}

FluidState moments(std::span<const double> f, const VelocityGrid& grid) {
  const RawMoments m = raw_moments(f, grid);
  if (m.rho <= 0.0) throw PhysicsError("moments: vacuum (rho <= 0)");
  FluidState s;
  s.rho = m.rho;
  for (int a = 0; a < 3; ++a) s.u[a] = m.mom[a] / m.rho;
  const double e = m.energy / m.rho - 0.5 * s.speed_sq();
  if (e <= 0.0) throw PhysicsError("moments: negative temperature");
  s.theta = e;  // e = (3/2) R theta with R = 2/3
  return s;
}

double n2_density(std::span<const double> f2, const VelocityGrid& grid) {
  return integrate_velocity(f2, grid);
}

}  // namespace bvpb

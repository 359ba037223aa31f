#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bvpb/errors.hpp"
#include "bvpb/fluid_state.hpp"

namespace bvpb {

// One velocity axis: uniform nodes on [center-halfwidth, center+halfwidth]
// with trapezoid weights (half weight at the two end nodes).
struct VelocityAxis {
  int count = 0;
  double center = 0.0;
  double halfwidth = 0.0;  // in velocity units
  double dv = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Uniform tensor grid in velocity space. Nodes are symmetric about the
// per-axis centers and the 3D quadrature weight factorizes per axis.
class VelocityGrid {
 public:
  // halfwidth_thermal is in units of sqrt(R*theta_ref) per axis.
  static VelocityGrid make(std::array<int, 3> counts, double halfwidth_thermal,
                           std::array<double, 3> center, double theta_ref);
  // Convenience: cubic grid centered on `center`.
  static VelocityGrid make_cubic(int n, double halfwidth_thermal,
                                 std::array<double, 3> center = {0, 0, 0},
                                 double theta_ref = 1.0);

  const VelocityAxis& axis(int a) const { return axes_[a]; }
  std::size_t node_count() const {
    return std::size_t(axes_[0].count) * axes_[1].count * axes_[2].count;
  }
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * axes_[1].count + j) * axes_[2].count + k;
  }
  double v1(int i) const { return axes_[0].nodes[i]; }
  double v2(int j) const { return axes_[1].nodes[j]; }
  double v3(int k) const { return axes_[2].nodes[k]; }
  double weight(int i, int j, int k) const {
    return axes_[0].weights[i] * axes_[1].weights[j] * axes_[2].weights[k];
  }
  double box_volume() const;
  double max_speed1() const;  // max |v1| over nodes

  // Tabulated per-node |v|^2/2 and weights, flattened in (i,j,k) order.
  const std::vector<double>& flat_weights() const { return flat_w_; }

 private:
  std::array<VelocityAxis, 3> axes_;
  std::vector<double> flat_w_;
};

struct SpaceGrid {
  int cells = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double dx = 0.0;
  bool periodic = false;

  static SpaceGrid make(int cells, double x_lo, double x_hi, bool periodic = false);
  double center(int i) const { return x_lo + (i + 0.5) * dx; }
  double length() const { return x_hi - x_lo; }
};

// Phase-space tensor indexed (cell, i1, i2, i3); cell-major so each spatial
// cell owns a contiguous velocity block.
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int nx, int n1, int n2, int n3)
      : nx_(nx), n1_(n1), n2_(n2), n3_(n3), data_(std::size_t(nx) * n1 * n2 * n3, 0.0) {}

  int nx() const { return nx_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int n3() const { return n3_; }
  std::size_t block_size() const { return std::size_t(n1_) * n2_ * n3_; }
  std::size_t size() const { return data_.size(); }

  double* cell(int x) { return data_.data() + std::size_t(x) * block_size(); }
  const double* cell(int x) const { return data_.data() + std::size_t(x) * block_size(); }
  std::span<double> cell_span(int x) { return {cell(x), block_size()}; }
  std::span<const double> cell_span(int x) const { return {cell(x), block_size()}; }

  double& at(int x, int i, int j, int k) {
    return data_[(std::size_t(x) * n1_ + i) * std::size_t(n2_) * n3_ + std::size_t(j) * n3_ + k];
  }
  double at(int x, int i, int j, int k) const {
    return data_[(std::size_t(x) * n1_ + i) * std::size_t(n2_) * n3_ + std::size_t(j) * n3_ + k];
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }
  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  int nx_ = 0, n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<double> data_;
};

// Simulator state tensors: F1 (total) and F2 (charge difference).
struct DistributionField {
  Tensor4 f1;
  Tensor4 f2;
  double time = 0.0;
};

struct RawMoments {
  double rho = 0.0;              // int F dv
  std::array<double, 3> mom{};   // int v_a F dv
  double energy = 0.0;           // int |v|^2/2 F dv
};

// Velocity-space quadrature of per-node values f: returns sum f*w.
double integrate_velocity(std::span<const double> f, const VelocityGrid& grid);

// Raw moments against the collision invariants (1, v, |v|^2/2), one cell.
RawMoments raw_moments(std::span<const double> f1_cell, const VelocityGrid& grid);

// Moments of an F1 slice converted to (rho, u, theta); e = theta, R = 2/3.
// Throws PhysicsError on rho <= 0 or theta <= 0.
FluidState moments(std::span<const double> f1_cell, const VelocityGrid& grid);

// n2 = int F2 dv at one cell.
double n2_density(std::span<const double> f2_cell, const VelocityGrid& grid);

}  // namespace bvpb

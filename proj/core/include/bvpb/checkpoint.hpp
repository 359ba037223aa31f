#pragma once

#include <string>

#include "bvpb/solver.hpp"

namespace bvpb {

// Versioned binary state dump: grids + both tensors + time/step
// (layout documented in docs/checkpoint.md).
void write_checkpoint(const std::string& path, const SimulationState& state,
                      const SpaceGrid& space, const VelocityGrid& velocity);

struct Checkpoint {
  SpaceGrid space;
  std::array<int, 3> v_counts{};
  std::array<double, 3> v_center{};
  double v_halfwidth = 0.0;  // in velocity units
  double time = 0.0;
  long step = 0;
  Tensor4 f1, f2;
};

Checkpoint read_checkpoint(const std::string& path);

}  // namespace bvpb

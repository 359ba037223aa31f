#pragma once

#include <stdexcept>
#include <string>

namespace bvpb {

// Thrown for malformed or physically inadmissible configuration
// (unknown keys, Lax violation, states not on a rarefaction curve, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a state leaves the physical regime (vacuum, negative
// temperature, reference band empty, ...).
struct PhysicsError : std::runtime_error {
  explicit PhysicsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on numerical failures: Newton nonconvergence, shooting failure,
// dimension mismatches, projection-violation on inverse operators.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bvpb

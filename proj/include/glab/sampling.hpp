#pragma once

#include <cstdint>

#include "glab/oracle.hpp"

namespace glab {

/// Counter-based random numbers: every value is a pure function of
/// (seed, index, lane), so results do not depend on evaluation order or
/// platform.
double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t lane);

double standard_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t lane);

/// Uniform point in the closed ball B_radius(center): normalized Gaussian
/// direction scaled by radius * U^(1/d).
Vector sample_in_ball(const Vector& center, double radius, std::uint64_t seed, std::uint64_t index);

}  // namespace glab

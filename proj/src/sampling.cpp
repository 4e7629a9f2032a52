#include "glab/sampling.hpp"

#include <cmath>
#include <numbers>

namespace glab {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ lane);
}

}  // namespace

double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  // 53 random bits, offset by half a step so the result lies in (0, 1).
  return (static_cast<double>(mix(seed, index, lane) >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  const double u1 = uniform01(seed, index, 2 * lane);
  const double u2 = uniform01(seed, index, 2 * lane + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector sample_in_ball(const Vector& center, double radius, std::uint64_t seed, std::uint64_t index) {
  const auto d = center.size();
  Vector dir(d);
  double norm = 0.0;
  // Redraw in the measure-zero event of a zero direction.
  for (std::uint64_t attempt = 0; norm == 0.0; ++attempt) {
    for (Eigen::Index k = 0; k < d; ++k) {
      dir[k] = standard_normal(seed, index, attempt * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(k) + 1);
    }
    norm = dir.norm();
  }
  const double u = uniform01(seed, index, 0);
  return center + (radius * std::pow(u, 1.0 / static_cast<double>(d)) / norm) * dir;
}

}  // namespace glab

#pragma once

#include <span>
#include <vector>

#include "glab/oracle.hpp"

namespace glab {

/// Shortest vector of conv(W) with its convex weights.
struct MinNormResult {
  Vector point;
  /// Simplex weights, one per input vector.
  std::vector<double> weights;
  /// max_w (||point||^2 - point^T w), clamped at zero.
  double wolfe_gap = 0.0;
  int major_cycles = 0;
};

constexpr double kDefaultMinNormTol = 1e-10;

/// Wolfe's minimum-norm-point method over the hull of `vectors`.
///
/// Terminates once min_w point^T w >= ||point||^2 - tol * max_i ||w_i||^2.
/// Deterministic: ties resolve to the lowest index. Throws ContractError on an
/// empty set, mixed dimensions or non-finite entries, and MinNormStalled after
/// 16 |W|^2 major cycles.
MinNormResult min_norm_point(std::span<const Vector> vectors, double tol = kDefaultMinNormTol);

}  // namespace glab

#pragma once

// Generators and independent oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "glab/circuit.hpp"

namespace glab::testing {

inline Vector random_vector(std::mt19937_64& rng, int d, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

/// Random circuit with `dim` inputs and exactly `size` nodes (output included).
/// Gates are hard max when `smax` is false, softmax with alpha in [0.25, 2]
/// otherwise. Operands lean towards recent nodes to get some depth.
inline Circuit random_circuit(std::mt19937_64& rng, int dim, int size, bool smax) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> sharp(0.25, 2.0);
  std::uniform_int_distribution<int> kind_pick(0, 9);
  std::vector<Node> nodes;
  for (int i = 0; i < dim; ++i) {
    Node n;
    n.kind = GateKind::kInput;
    n.name = "x" + std::to_string(i);
    n.input_index = i;
    nodes.push_back(n);
  }
  auto operand = [&]() {
    const int count = static_cast<int>(nodes.size());
    std::geometric_distribution<int> back(0.35);
    return count - 1 - std::min(back(rng), count - 1);
  };
  const int gates = std::max(1, size - dim - 1);
  for (int g = 0; g < gates; ++g) {
    Node n;
    n.name = "g" + std::to_string(g);
    const int k = kind_pick(rng);
    if (k == 0) {
      n.kind = GateKind::kConst;
      n.param = unit(rng);
    } else if (k <= 2) {
      n.kind = GateKind::kScale;
      n.lhs = operand();
      n.param = unit(rng);
    } else if (k <= 5) {
      n.kind = GateKind::kAdd;
      n.lhs = operand();
      n.rhs = operand();
    } else {
      n.kind = smax ? GateKind::kSmax : GateKind::kMax;
      n.lhs = operand();
      n.rhs = operand();
      if (smax) n.param = sharp(rng);
    }
    nodes.push_back(n);
  }
  Node out;
  out.kind = GateKind::kOutput;
  out.lhs = static_cast<int>(nodes.size()) - 1;
  nodes.push_back(out);
  return Circuit(std::move(nodes));
}

/// Minimum norm over conv(W) by exhaustive search: a simplex grid of the given
/// mesh over all weights but the last two, and an exact line minimization over
/// the segment that the last two weights span.
inline double brute_force_min_norm(std::span<const Vector> w, double mesh = 1e-3) {
  const int k = static_cast<int>(w.size());
  if (k == 1) return w[0].norm();
  const int steps = static_cast<int>(std::lround(1.0 / mesh));
  const Vector& a = w[static_cast<std::size_t>(k - 2)];
  const Vector& b = w[static_cast<std::size_t>(k - 1)];
  const Vector ab = b - a;
  const double ab2 = ab.squaredNorm();

  double best = std::numeric_limits<double>::infinity();
  // base = sum of gridded weights times vectors; rest = mass left for a and b.
  auto line = [&](const Vector& base, double rest) {
    // minimize ||base + rest (a + s (b - a))|| over s in [0, 1]
    double s = 0.0;
    if (rest > 0.0 && ab2 > 0.0) s = std::clamp(-(base + rest * a).dot(ab) / (rest * ab2), 0.0, 1.0);
    best = std::min(best, (base + rest * (a + s * ab)).norm());
  };

  // Depth-first over compositions of the gridded weights; scratch[j] holds the
  // partial sum after fixing the first j weights.
  const int free = k - 2;
  std::vector<Vector> scratch(static_cast<std::size_t>(free + 1), Vector::Zero(a.size()));
  auto walk = [&](auto&& self, int j, int used) -> void {
    if (j == free) {
      line(scratch[static_cast<std::size_t>(j)], std::max(0.0, 1.0 - used * mesh));
      return;
    }
    const Vector& step = w[static_cast<std::size_t>(j)];
    for (int n = 0; used + n <= steps; ++n) {
      scratch[static_cast<std::size_t>(j + 1)] = scratch[static_cast<std::size_t>(j)] + (n * mesh) * step;
      self(self, j + 1, used + n);
    }
  };
  walk(walk, 0, 0);
  return best;
}

/// max |fd - grad| / max(1, ||grad||_inf) with central differences.
inline double fd_relative_error(const Circuit& c, const Vector& x, double h = 1e-5) {
  const Vector g = c.gradient(x);
  double worst = 0.0;
  for (int i = 0; i < c.dim(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (c.evaluate(xp) - c.evaluate(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]));
  }
  return worst / std::max(1.0, g.cwiseAbs().maxCoeff());
}

}  // namespace glab::testing

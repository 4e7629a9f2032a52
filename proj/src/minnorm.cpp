#include "glab/minnorm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "glab/errors.hpp"

namespace glab {

namespace {

constexpr double kRankCutoff = 1e-12;

// Weights mu (sum 1) minimizing ||sum mu_i w_i|| over the affine hull of the
// corral. Written as w_0 + A c with A = [w_i - w_0], solved in the minimum-norm
// least-squares sense so affinely dependent corrals stay well defined.
std::vector<double> affine_minimizer(std::span<const Vector> vectors, const std::vector<int>& corral) {
  const std::size_t k = corral.size();
  if (k == 1) return {1.0};
  const Vector& base = vectors[corral[0]];
  Matrix a(base.size(), static_cast<Eigen::Index>(k - 1));
  for (std::size_t i = 1; i < k; ++i) a.col(static_cast<Eigen::Index>(i - 1)) = vectors[corral[i]] - base;

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankCutoff);
  cod.compute(a);
  const Vector c = cod.solve(-base);

  std::vector<double> mu(k);
  mu[0] = 1.0 - c.sum();
  for (std::size_t i = 1; i < k; ++i) mu[i] = c[static_cast<Eigen::Index>(i - 1)];
  return mu;
}

Vector combine(std::span<const Vector> vectors, const std::vector<int>& corral, const std::vector<double>& lambda) {
  Vector x = Vector::Zero(vectors[corral[0]].size());
  for (std::size_t i = 0; i < corral.size(); ++i) x += lambda[i] * vectors[corral[i]];
  return x;
}

}  // namespace

MinNormResult min_norm_point(std::span<const Vector> vectors, double tol) {
  if (vectors.empty()) throw ContractError("min_norm_point: empty vector set");
  if (!(tol > 0.0)) throw ContractError("min_norm_point: tolerance must be positive");
  const Eigen::Index dim = vectors[0].size();
  double scale = 0.0;
  int start = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim) throw ContractError("min_norm_point: vectors differ in dimension");
    if (!vectors[i].allFinite()) throw ContractError("min_norm_point: non-finite vector at index " + std::to_string(i));
    const double sq = vectors[i].squaredNorm();
    if (sq < vectors[start].squaredNorm()) start = static_cast<int>(i);
    scale = std::max(scale, sq);
  }

  const int n = static_cast<int>(vectors.size());
  const double slack = tol * scale;
  const long cap = 16L * n * n;

  std::vector<int> corral{start};
  std::vector<double> lambda{1.0};
  Vector x = vectors[start];

  MinNormResult result;
  for (long major = 0;; ++major) {
    const double xx = x.squaredNorm();
    int entering = 0;
    double lowest = x.dot(vectors[0]);
    for (int j = 1; j < n; ++j) {
      const double v = x.dot(vectors[j]);
      if (v < lowest) {
        lowest = v;
        entering = j;
      }
    }
    if (xx - lowest <= slack) {
      result.major_cycles = static_cast<int>(major);
      break;
    }
    if (major >= cap || std::find(corral.begin(), corral.end(), entering) != corral.end()) {
      throw MinNormStalled("min-norm stalled after " + std::to_string(major) + " major cycles");
    }

    corral.push_back(entering);
    lambda.push_back(0.0);

    // Minor cycles: move toward the affine minimizer, dropping vertices whose
    // weight reaches zero, until the minimizer lies inside the corral's simplex.
    while (true) {
      const std::vector<double> mu = affine_minimizer(vectors, corral);
      if (std::all_of(mu.begin(), mu.end(), [](double m) { return m > 0.0; })) {
        lambda = mu;
        break;
      }
      double theta = 1.0;
      std::size_t blocking = 0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] <= 0.0) {
          const double ratio = lambda[i] / (lambda[i] - mu[i]);
          if (ratio < theta) {
            theta = ratio;
            blocking = i;
          }
        }
      }
      for (std::size_t i = 0; i < mu.size(); ++i) lambda[i] = (1.0 - theta) * lambda[i] + theta * mu[i];
      lambda[blocking] = 0.0;

      std::vector<int> kept_corral;
      std::vector<double> kept_lambda;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (lambda[i] > 0.0) {
          kept_corral.push_back(corral[i]);
          kept_lambda.push_back(lambda[i]);
        }
      }
      corral = std::move(kept_corral);
      lambda = std::move(kept_lambda);
      double total = 0.0;
      for (double l : lambda) total += l;
      for (double& l : lambda) l /= total;
    }
    x = combine(vectors, corral, lambda);
  }

  result.point = x;
  result.weights.assign(vectors.size(), 0.0);
  for (std::size_t i = 0; i < corral.size(); ++i) result.weights[corral[i]] = lambda[i];

  double gap = 0.0;
  const double xx = x.squaredNorm();
  for (const Vector& w : vectors) gap = std::max(gap, xx - x.dot(w));
  result.wolfe_gap = gap;
  return result;
}

}  // namespace glab

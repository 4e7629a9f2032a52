#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glab/algorithms.hpp"
#include "glab/circuit.hpp"
#include "glab/minnorm.hpp"
#include "glab/oracle.hpp"

namespace glab {

/// 1/2 ||x||^2 inside the unit ball, ||x|| - 1/2 outside: 1-Lipschitz and
/// 1-smooth. Declares L = 1, M = 0 and a gap of 0.5 (from a unit-norm start).
class QuadOracle final : public FunctionOracle {
 public:
  explicit QuadOracle(int dim) : dim_(dim) {}

  int dim() const override { return dim_; }
  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  OracleMeta meta() const override { return {1.0, 0.5, 0.0}; }

 private:
  int dim_;
};

/// max(x, -x) = |x| as a four-node circuit.
Circuit absval_circuit();

/// (L/3) max_{i<=T} x_i + L/(6 R sqrt(T)) ||x||^2 with T = floor(L^2 R^2 / (36 eps^2)) + 1.
///
/// The subgradient uses the smallest maximizing index, which reveals at most
/// one new coordinate per query.
class ConvexHardInstance final : public FunctionOracle {
 public:
  /// Throws ContractError unless d >= floor(10 L^2 R^2 / eps^2) + 1.
  ConvexHardInstance(double lipschitz, double radius, double eps, int dim);

  int dim() const override { return dim_; }
  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  OracleMeta meta() const override;

  int active() const { return active_; }
  /// Last t with the guarantee f(x^t) - f* >= eps, floor(L^2 R^2 / (36 eps^2)).
  int horizon() const { return active_ - 1; }
  Vector optimum_point() const;
  double optimum_value() const;

 private:
  double lipschitz_;
  double radius_;
  double eps_;
  int dim_;
  int active_;
};

struct ConvexLbRow {
  int t = 0;
  double gap = 0.0;
  int support_size = 0;
};

struct ConvexLbTrace {
  std::vector<ConvexLbRow> rows;
  int horizon = 0;
  double eps = 0.0;
  /// Every gap >= eps and every |supp(x^t)| <= t.
  bool gaps_ok = true;
  bool supports_ok = true;
};

/// Runs `algo` from 0_d on the convex hard instance for t = 0..horizon.
/// Throws ZeroRespectViolation when an iterate leaves the revealed coordinates.
ConvexLbTrace simulate_convex_lb(double lipschitz, double radius, double eps, int dim, Stepper& algo);

/// Smallest dimension accepted by ConvexHardInstance.
int convex_hard_min_dim(double lipschitz, double radius, double eps);

/// f = (L/7) max{h, -7 Delta/L}: h is a quadratic blend around each center
/// inside B_r(x^t) (value 0 and gradient e1 at the center) and e2^T x elsewhere,
/// with r a quarter of the smallest pairwise center distance.
class ResistingFunction final : public FunctionOracle {
 public:
  /// Throws ContractError on fewer than two centers, duplicates or d < 2.
  ResistingFunction(std::vector<Vector> centers, double lipschitz, double gap);

  int dim() const override { return dim_; }
  double value(const Vector& x) const override;
  Vector subgradient(const Vector& x) const override;
  OracleMeta meta() const override { return {lipschitz_, gap_, std::nullopt}; }

  double radius() const { return radius_; }
  const std::vector<Vector>& centers() const { return centers_; }
  double lipschitz() const { return lipschitz_; }
  double gap() const { return gap_; }

  /// The unclipped, unscaled h and a gradient of it.
  double h(const Vector& x) const;
  Vector h_gradient(const Vector& x) const;

 private:
  /// Index of the center whose closed r-ball holds x, or -1.
  int owner(const Vector& x) const;

  std::vector<Vector> centers_;
  double lipschitz_;
  double gap_;
  double radius_;
  int dim_;
};

ResistingFunction resisting_fn(std::vector<Vector> centers, double lipschitz, double gap);

/// One-dimensional 1-Lipschitz function with f'(q) = 1 on every query q and
/// f(x) = x - xhat on [xhat - delta - eta, xhat + delta + eta]. Outside that
/// interval f sits on the plateau +/-(delta + eta) with small dips around the
/// queries that keep the slope at each query equal to 1.
class BumpFunction1D final : public FunctionOracle {
 public:
  BumpFunction1D(std::vector<double> queries, double xhat, double delta, double eta);

  int dim() const override { return 1; }
  double value(const Vector& x) const override { return value_at(x[0]); }
  Vector subgradient(const Vector& x) const override { return Vector::Constant(1, derivative_at(x[0])); }
  OracleMeta meta() const override { return {1.0, 1.0 + delta_ + eta_, std::nullopt}; }

  double value_at(double x) const;
  /// Right derivative.
  double derivative_at(double x) const;

  double xhat() const { return xhat_; }
  double delta() const { return delta_; }
  double eta() const { return eta_; }
  double radius() const { return radius_; }
  const std::vector<double>& queries() const { return queries_; }

 private:
  std::vector<double> queries_;
  double xhat_;
  double delta_;
  double eta_;
  double radius_;
};

/// Builds the 1-D hard function for queries Q and candidate xhat. When `eta`
/// is absent the largest 2^-k (1 - delta)/2 keeping xhat +/- (delta + eta) out
/// of Q is used. Requires 0 < delta < 1 and 0 < eta < 1 - delta.
BumpFunction1D bump1d(std::vector<double> queries, double xhat, double delta, std::optional<double> eta = std::nullopt);

/// f_U(x) = f(U^T x), grad f_U(x) = U grad f(U^T x) for column-orthonormal U.
class RotatedOracle final : public FunctionOracle {
 public:
  RotatedOracle(OraclePtr base, Matrix u);

  int dim() const override { return static_cast<int>(u_.rows()); }
  double value(const Vector& x) const override { return base_->value(u_.transpose() * x); }
  Vector subgradient(const Vector& x) const override { return u_ * base_->subgradient(u_.transpose() * x); }
  OracleMeta meta() const override { return base_->meta(); }

  const Matrix& matrix() const { return u_; }

 private:
  OraclePtr base_;
  Matrix u_;
};

/// Throws ContractError unless U has base->dim() columns and U^T U = I to 1e-12.
RotatedOracle rotate(OraclePtr base, Matrix u);

/// Whitespace-separated rows; every row must have the same number of entries.
Matrix read_matrix(const std::string& text);
Matrix read_matrix_file(const std::string& path);

struct GoldsteinEstimate {
  /// ||min-norm point|| of the sampled gradients: an upper bound on
  /// min{||g|| : g in the delta-Goldstein subdifferential}.
  double value = 0.0;
  MinNormResult minnorm;
  std::vector<Vector> points;
  std::vector<Vector> gradients;
};

/// Samples n points uniformly in B_delta(x) with a counter-based generator
/// keyed by (seed, index) and takes the min-norm point of their gradients.
GoldsteinEstimate estimate_goldstein_min_norm(const FunctionOracle& oracle, const Vector& x, double delta,
                                              int n_samples, std::uint64_t seed,
                                              double tol = kDefaultMinNormTol);

}  // namespace glab

#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Core>

namespace glab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Declared properties of a function class member.
struct OracleMeta {
  double lipschitz = 1.0;
  /// f(0) - inf f, or the gap from a named start point when documented.
  double gap = 0.0;
  /// f is Theta(2^M)-smooth; empty for nonsmooth functions.
  std::optional<double> smoothness_exp;
};

/// One local-oracle answer: the value and one Clarke subgradient.
struct OracleAnswer {
  double value = 0.0;
  Vector subgradient;
};

/// 0th and 1st order oracle of a Lipschitz function on R^d.
///
/// Implementations must be pure: answers depend only on the query point, so
/// one instance may serve many threads.
class FunctionOracle {
 public:
  virtual ~FunctionOracle() = default;

  virtual int dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector subgradient(const Vector& x) const = 0;
  virtual OracleMeta meta() const = 0;

  OracleAnswer query(const Vector& x) const { return {value(x), subgradient(x)}; }
};

using OraclePtr = std::shared_ptr<const FunctionOracle>;

/// Oracle assembled from callables. Used by bindings and tests.
class CallableOracle final : public FunctionOracle {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  CallableOracle(int dim, ValueFn value, GradFn grad, OracleMeta meta)
      : dim_(dim), value_(std::move(value)), grad_(std::move(grad)), meta_(meta) {}

  int dim() const override { return dim_; }
  double value(const Vector& x) const override { return value_(x); }
  Vector subgradient(const Vector& x) const override { return grad_(x); }
  OracleMeta meta() const override { return meta_; }

 private:
  int dim_;
  ValueFn value_;
  GradFn grad_;
  OracleMeta meta_;
};

}  // namespace glab

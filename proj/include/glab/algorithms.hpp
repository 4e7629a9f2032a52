#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "glab/oracle.hpp"

namespace glab {

/// A deterministic query algorithm: starts at 0_d and maps each oracle answer
/// at the current query to the next query.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual std::string name() const = 0;
  virtual void reset(int dim) = 0;
  virtual Vector next(const Vector& x, const OracleAnswer& answer) = 0;
};

/// x_{t+1} = x_t - eta_t g_t with eta_t = step, or step / sqrt(t + 1) when
/// `diminishing`.
class GradientStepper final : public Stepper {
 public:
  explicit GradientStepper(double step, bool diminishing = false) : step_(step), diminishing_(diminishing) {}

  std::string name() const override { return diminishing_ ? "sgd" : "gd"; }
  void reset(int) override { t_ = 0; }
  Vector next(const Vector& x, const OracleAnswer& answer) override;

 private:
  double step_;
  bool diminishing_;
  int t_ = 0;
};

/// Ignores answers and walks a planar lattice in coordinates 1 and 2, row by
/// row: (0,0), (s,0), ..., (0,s), (s,s), ...
class GridStepper final : public Stepper {
 public:
  GridStepper(double spacing, int columns) : spacing_(spacing), columns_(columns) {}

  std::string name() const override { return "grid"; }
  void reset(int dim) override;
  Vector next(const Vector& x, const OracleAnswer& answer) override;

 private:
  double spacing_;
  int columns_;
  int dim_ = 0;
  int t_ = 0;
};

/// Built-ins: "gd" (step 0.01), "sgd" (0.1/sqrt(t+1)), "grid" (spacing 0.1,
/// 4 columns). Returns nullptr for unknown names.
std::unique_ptr<Stepper> make_stepper(std::string_view name);

struct ZeroRespectReport {
  bool ok = true;
  /// (t, j) of the first violation, j 1-based. t = 0 flags a nonzero start.
  std::optional<std::pair<int, int>> first_violation;
};

/// supp(x^t) within the union of supp(g^s), s < t, for all t >= 1, and x^0 = 0.
ZeroRespectReport check_zero_respecting(std::span<const Vector> queries, std::span<const Vector> gradients);

}  // namespace glab

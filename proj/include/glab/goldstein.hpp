#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "glab/minnorm.hpp"
#include "glab/oracle.hpp"

namespace glab {

struct SolverConfig {
  double delta = 0.1;  ///< Goldstein radius
  double eps = 0.1;    ///< target min-norm
  int max_outer = 1000;
  /// f is Theta(2^M)-smooth.
  double smoothness_exp = 0.0;
  long inner_cap = 0;
  int bisect_cap = 0;
  double tol_minnorm = kDefaultMinNormTol;

  /// Caps from the iteration bounds: inner >= ceil(64 L^2/eps^2 ln(L/eps)) + 1,
  /// bisection >= M + ceil(log2(delta/eps)) + 32.
  static SolverConfig with_bounds(double delta, double eps, int max_outer, double smoothness_exp, double lipschitz);

  /// Throws ContractError when a field is out of range.
  void validate() const;
};

enum class SolveStatus { kGoldsteinStationary, kOuterBudgetExhausted, kInnerStalled, kBisectStalled };

std::string_view to_string(SolveStatus status);

/// One outer iteration of the solver.
struct TraceRow {
  int k = 0;
  double f = 0.0;
  double gnorm = 0.0;
  int w_size = 0;
  int inner_iters = 0;
  /// Cumulative oracle calls at the end of the iteration.
  long calls0 = 0;
  long calls1 = 0;
  bool accepted = false;
  /// f(x_k) - f(x_{k+1}) when the step was accepted.
  double decrease = 0.0;
};

/// ||g_next||^2 <= (1 - eps^2/(64 L^2)) ||g||^2 + slack after adding g_new.
struct ContractionCheck {
  int k = 0;
  double gnorm_sq = 0.0;
  double next_gnorm_sq = 0.0;
  double bound = 0.0;
  /// g_new^T g <= 3/4 ||g||^2 held for the added element.
  bool separating = false;
  bool ok = false;
};

struct SolverReport {
  SolveStatus status = SolveStatus::kOuterBudgetExhausted;
  Vector final_point;
  double final_value = 0.0;
  double final_minnorm = 0.0;
  /// Min-norm element of conv(W) at the last iterate and the points where
  /// each element of W was queried.
  MinNormResult witness;
  std::vector<Vector> witness_points;
  std::vector<TraceRow> trace;
  std::vector<ContractionCheck> contractions;
  long calls0 = 0;
  long calls1 = 0;
  int max_bisect_iters = 0;
  std::string message;

  long total_calls() const { return calls0 + calls1; }
};

struct BisectResult {
  double t = 0.0;
  Vector g_new;
  int iterations = 0;
};

/// True iff f(x - delta g/||g||) - f(x) <= -(delta/2)||g||. `fx` is f(x).
/// Costs one 0th-order call.
bool check_descent(const FunctionOracle& oracle, const Vector& x, double fx, const Vector& g, double delta);

/// Bisection on h(t) = f(x - t u) - f(x) + (t/2)||g0||, u = g0/||g0||, over
/// [0, delta], first probing t = delta and stopping once h'(t) >= -eps/4.
/// Returns t and g_new = grad f(x - t u). Throws ContractError if ||g0|| <= eps
/// and BisectStalled after `cap` probes.
BisectResult binary_search(const FunctionOracle& oracle, const Vector& x, double fx, const Vector& g0, double delta,
                           double eps, int cap);

/// Modified Goldstein subgradient method. Requires declared smoothness.
SolverReport solve(const FunctionOracle& oracle, const Vector& x0, const SolverConfig& config);

/// 64 Delta L^2 M / (delta eps^3) log(L/eps) log(delta/eps), with each log
/// factor and M floored at 1.
double oracle_call_bound(double gap, double lipschitz, double smoothness_exp, double delta, double eps);

/// CSV with header k,f,gnorm,W_size,inner_iters,calls0,calls1.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace glab

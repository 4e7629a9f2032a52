#include "glab/goldstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "glab/errors.hpp"

namespace glab {

namespace {

// Tallies 0th and 1st order calls made through it.
class CountingOracle final : public FunctionOracle {
 public:
  explicit CountingOracle(const FunctionOracle& base) : base_(base) {}

  int dim() const override { return base_.dim(); }
  double value(const Vector& x) const override {
    ++calls0_;
    return base_.value(x);
  }
  Vector subgradient(const Vector& x) const override {
    ++calls1_;
    return base_.subgradient(x);
  }
  OracleMeta meta() const override { return base_.meta(); }

  long calls0() const { return calls0_; }
  long calls1() const { return calls1_; }

 private:
  const FunctionOracle& base_;
  mutable long calls0_ = 0;
  mutable long calls1_ = 0;
};

double log_factor(double ratio) { return std::max(1.0, std::log(ratio)); }

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kGoldsteinStationary:
      return "GoldsteinStationary";
    case SolveStatus::kOuterBudgetExhausted:
      return "OuterBudgetExhausted";
    case SolveStatus::kInnerStalled:
      return "InnerStalled";
    case SolveStatus::kBisectStalled:
      return "BisectStalled";
  }
  return "?";
}

SolverConfig SolverConfig::with_bounds(double delta, double eps, int max_outer, double smoothness_exp,
                                       double lipschitz) {
  SolverConfig cfg;
  cfg.delta = delta;
  cfg.eps = eps;
  cfg.max_outer = max_outer;
  cfg.smoothness_exp = smoothness_exp;
  const double ratio = lipschitz / eps;
  cfg.inner_cap = static_cast<long>(std::ceil(64.0 * ratio * ratio * log_factor(ratio))) + 1;
  cfg.bisect_cap = static_cast<int>(std::ceil(smoothness_exp)) +
                   std::max(0, static_cast<int>(std::ceil(std::log2(delta / eps)))) + 32;
  return cfg;
}

void SolverConfig::validate() const {
  if (!(delta > 0.0)) throw ContractError("delta must be positive");
  if (!(eps > 0.0)) throw ContractError("eps must be positive");
  if (max_outer < 1) throw ContractError("outer iteration cap T must be >= 1");
  if (inner_cap < 1) throw ContractError("inner_cap must be >= 1");
  if (bisect_cap < 1) throw ContractError("bisect_cap must be >= 1");
  if (!(tol_minnorm > 0.0)) throw ContractError("tol_minnorm must be positive");
}

bool check_descent(const FunctionOracle& oracle, const Vector& x, double fx, const Vector& g, double delta) {
  const double gnorm = g.norm();
  if (!(gnorm > 0.0)) throw ContractError("check_descent: direction must be nonzero");
  const double f_step = oracle.value(x - (delta / gnorm) * g);
  return f_step - fx <= -0.5 * delta * gnorm;
}

BisectResult binary_search(const FunctionOracle& oracle, const Vector& x, double fx, const Vector& g0, double delta,
                           double eps, int cap) {
  const double g0_norm = g0.norm();
  if (!(g0_norm > eps)) throw ContractError("binary_search: requires ||g0|| > eps");
  const Vector u = g0 / g0_norm;
  const double threshold = -0.25 * eps;

  auto probe = [&](double t) { return x - t * u; };
  auto h = [&](double t) { return oracle.value(probe(t)) - fx + 0.5 * t * g0_norm; };

  BisectResult out;
  out.t = delta;
  out.g_new = oracle.subgradient(probe(delta));
  out.iterations = 1;
  if (-out.g_new.dot(u) + 0.5 * g0_norm >= threshold) return out;

  // Invariant: h(hi) > h(lo); some point of (lo, hi) then has h' > 0.
  double lo = 0.0;
  double hi = delta;
  double h_hi = h(delta);
  while (out.iterations < cap) {
    const double t = 0.5 * (lo + hi);
    out.t = t;
    out.g_new = oracle.subgradient(probe(t));
    ++out.iterations;
    if (-out.g_new.dot(u) + 0.5 * g0_norm >= threshold) return out;
    const double h_t = h(t);
    if (h_hi > h_t) {
      lo = t;
    } else {
      hi = t;
      h_hi = h_t;
    }
  }
  throw BisectStalled("binary search exceeded " + std::to_string(cap) + " probes");
}

SolverReport solve(const FunctionOracle& oracle, const Vector& x0, const SolverConfig& config) {
  config.validate();
  const OracleMeta meta = oracle.meta();
  if (!meta.smoothness_exp) throw ContractError("solve: oracle declares no smoothness exponent (nonsmooth)");
  if (x0.size() != oracle.dim()) throw ContractError("solve: start point has wrong dimension");

  CountingOracle counted(oracle);
  const double delta = config.delta;
  const double eps = config.eps;
  const double contraction = 1.0 - eps * eps / (64.0 * meta.lipschitz * meta.lipschitz);

  SolverReport report;
  Vector x = x0;
  double fx = counted.value(x);

  auto finish = [&](SolveStatus status) {
    report.status = status;
    report.final_point = x;
    report.final_value = fx;
    report.calls0 = counted.calls0();
    report.calls1 = counted.calls1();
  };

  for (int k = 0; k < config.max_outer; ++k) {
    std::vector<Vector> w{counted.subgradient(x)};
    std::vector<Vector> where{x};
    TraceRow row;
    row.k = k;
    row.f = fx;

    MinNormResult mn;
    double gnorm = 0.0;
    std::optional<ContractionCheck> pending;
    auto record_row = [&] {
      row.gnorm = gnorm;
      row.w_size = static_cast<int>(w.size());
      row.calls0 = counted.calls0();
      row.calls1 = counted.calls1();
      report.trace.push_back(row);
      report.witness = mn;
      report.witness_points = where;
      report.final_minnorm = gnorm;
    };

    while (true) {
      mn = min_norm_point(w, config.tol_minnorm);
      gnorm = mn.point.norm();

      if (pending) {
        double scale = 0.0;
        for (const Vector& v : w) scale = std::max(scale, v.squaredNorm());
        pending->next_gnorm_sq = gnorm * gnorm;
        pending->ok = pending->next_gnorm_sq <= pending->bound + 2.0 * config.tol_minnorm * scale;
        report.contractions.push_back(*pending);
        pending.reset();
      }

      if (gnorm <= eps) {
        record_row();
        finish(SolveStatus::kGoldsteinStationary);
        return report;
      }

      const Vector step = x - (delta / gnorm) * mn.point;
      const double f_step = counted.value(step);
      if (f_step - fx <= -0.5 * delta * gnorm) {
        row.accepted = true;
        row.decrease = fx - f_step;
        record_row();
        x = step;
        fx = f_step;
        break;
      }

      if (row.inner_iters >= config.inner_cap) {
        record_row();
        finish(SolveStatus::kInnerStalled);
        report.message = "inner loop exceeded " + std::to_string(config.inner_cap) + " iterations";
        return report;
      }

      BisectResult found;
      try {
        found = binary_search(counted, x, fx, mn.point, delta, eps, config.bisect_cap);
      } catch (const BisectStalled& e) {
        record_row();
        finish(SolveStatus::kBisectStalled);
        report.message = e.what();
        return report;
      }
      report.max_bisect_iters = std::max(report.max_bisect_iters, found.iterations);

      ContractionCheck check;
      check.k = k;
      check.gnorm_sq = gnorm * gnorm;
      check.bound = contraction * check.gnorm_sq;
      check.separating = found.g_new.dot(mn.point) <= 0.75 * check.gnorm_sq;
      pending = check;

      w.push_back(std::move(found.g_new));
      where.push_back(x - (found.t / gnorm) * mn.point);
      ++row.inner_iters;
    }
  }

  finish(SolveStatus::kOuterBudgetExhausted);
  return report;
}

double oracle_call_bound(double gap, double lipschitz, double smoothness_exp, double delta, double eps) {
  return 64.0 * gap * lipschitz * lipschitz * std::max(1.0, smoothness_exp) / (delta * eps * eps * eps) *
         log_factor(lipschitz / eps) * log_factor(delta / eps);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "k,f,gnorm,W_size,inner_iters,calls0,calls1\n";
  char buf[256];
  for (const TraceRow& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%d,%ld,%ld\n", r.k, r.f, r.gnorm, r.w_size, r.inner_iters,
                  r.calls0, r.calls1);
    out << buf;
  }
}

}  // namespace glab

#include "glab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "glab/errors.hpp"
#include "glab/sampling.hpp"

namespace glab {

namespace {

constexpr double kExactTol = 1e-12;
constexpr double kEstimateTol = 1e-6;

bool within_lipschitz(double df, double dx, double lipschitz) {
  return df <= lipschitz * dx * (1.0 + 1e-12) + 1e-12;
}

}  // namespace

ResistingOracle::ResistingOracle(double lipschitz, int dim) : dim_(dim) {
  if (!(lipschitz > 0.0)) throw ContractError("resisting oracle: L must be positive");
  if (dim < 2) throw ContractError("resisting oracle: dimension must be >= 2");
  transcript_.lipschitz = lipschitz;
}

OracleAnswer ResistingOracle::query(const Vector& x) {
  if (x.size() != dim_) throw ContractError("resisting oracle: query has wrong dimension");
  if (!x.allFinite()) throw ContractError("resisting oracle: non-finite query");
  OracleAnswer answer{0.0, Vector::Zero(dim_)};
  answer.subgradient[0] = transcript_.lipschitz / 7.0;
  transcript_.queries.push_back(x);
  transcript_.answers.push_back(answer);
  return answer;
}

ZeroRespectReport check_zero_respecting(const Transcript& transcript) {
  std::vector<Vector> gradients;
  gradients.reserve(transcript.answers.size());
  for (const OracleAnswer& a : transcript.answers) gradients.push_back(a.subgradient);
  return check_zero_respecting(transcript.queries, gradients);
}

ResistingFunction materialize(const Transcript& transcript, double lipschitz, double gap) {
  std::vector<Vector> centers;
  for (const Vector& q : transcript.queries) {
    const bool seen = std::any_of(centers.begin(), centers.end(), [&](const Vector& c) { return c == q; });
    if (!seen) centers.push_back(q);
  }
  if (centers.size() < 2) throw ContractError("degenerate transcript: fewer than two distinct queries");
  return ResistingFunction(std::move(centers), lipschitz, gap);
}

std::string_view to_string(Consistency c) {
  switch (c) {
    case Consistency::kInconsistent:
      return "0";
    case Consistency::kConsistent:
      return "1";
    case Consistency::kConditional:
      return "conditional";
  }
  return "?";
}

ConsistencyReport verify_consistency(const ResistingFunction& f, const Transcript& transcript, int n_pairs,
                                     std::uint64_t seed) {
  ConsistencyReport report;
  const double lip = f.lipschitz();
  bool answers_ok = true;

  for (std::size_t t = 0; t < transcript.queries.size(); ++t) {
    const Vector& x = transcript.queries[t];
    const OracleAnswer& given = transcript.answers[t];
    CenterCheck c;
    c.value_error = std::abs(f.value(x) - given.value);
    c.gradient_error = (f.subgradient(x) - given.subgradient).cwiseAbs().maxCoeff();
    c.axis_residual = std::abs(x[1]);
    const bool match = c.value_error <= kExactTol && c.gradient_error <= kExactTol;
    if (!match) {
      c.status = Consistency::kInconsistent;
      answers_ok = false;
      if (report.diagnostic.empty()) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "value/gradient mismatch at t=%zu (value error %.3g, gradient error %.3g)", t,
                      c.value_error, c.gradient_error);
        report.diagnostic = buf;
      }
    } else if (c.axis_residual != 0.0) {
      c.status = Consistency::kConditional;
      report.conditional = true;
    }
    report.max_value_error = std::max(report.max_value_error, c.value_error);
    report.max_gradient_error = std::max(report.max_gradient_error, c.gradient_error);
    report.max_axis_residual = std::max(report.max_axis_residual, c.axis_residual);
    report.centers.push_back(c);
  }

  // f(0) = (L/7) max{h(0), -7 Delta/L}; inf f = -Delta because e2^T x is
  // unbounded below away from the balls.
  const Vector origin = Vector::Zero(f.dim());
  report.value_gap = f.value(origin) + f.gap();
  report.gap_ok = report.value_gap <= f.gap() + kExactTol;

  // Pairs concentrated around the bumps, where h bends, plus wide pairs.
  const auto& centers = f.centers();
  const double r = f.radius();
  report.lipschitz_ok = true;
  for (int i = 0; i < n_pairs; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const Vector& c = centers[static_cast<std::size_t>(i) % centers.size()];
    const double spread = (i % 4 == 3) ? 50.0 * r : 1.5 * r;
    const Vector x = sample_in_ball(c, spread, seed, 2 * idx);
    const Vector y = sample_in_ball(x, (i % 2 == 0) ? 0.5 * r : spread, seed, 2 * idx + 1);
    const double dx = (x - y).norm();
    if (dx == 0.0) continue;
    const double df = std::abs(f.value(x) - f.value(y));
    report.max_lipschitz_ratio = std::max(report.max_lipschitz_ratio, df / dx);
    if (!within_lipschitz(df, dx, lip)) report.lipschitz_ok = false;
  }
  if (!report.lipschitz_ok && report.diagnostic.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "sampled Lipschitz ratio %.6g exceeds L = %.6g", report.max_lipschitz_ratio, lip);
    report.diagnostic = buf;
  }

  report.ok = answers_ok && report.gap_ok && report.lipschitz_ok;
  return report;
}

NonstationarityReport verify_nonstationary(const ResistingFunction& f, std::span<const Vector> points, double delta,
                                           double eps, int n_samples, std::uint64_t seed) {
  const double limit = f.gap() / (2.0 * f.lipschitz());
  if (!(delta > 0.0) || delta > limit) {
    throw ContractError("verify_nonstationary: requires 0 < delta <= Delta/(2L) = " + std::to_string(limit));
  }
  NonstationarityReport report;
  report.threshold = std::max(eps, f.lipschitz() / 252.0);
  for (const Vector& x : points) {
    const double est = estimate_goldstein_min_norm(f, x, delta, n_samples, seed).value;
    const bool ok = est >= report.threshold - kEstimateTol;
    report.estimates.push_back(est);
    report.passed.push_back(ok);
    report.all_passed = report.all_passed && ok;
  }
  return report;
}

bool AdversaryReport::certified() const {
  return zero_respect.ok && consistency.ok && !consistency.conditional && nonstationarity.all_passed;
}

AdversaryReport run_adversarial(Stepper& algo, const AdversaryConfig& config) {
  if (config.queries < 1) throw ContractError("run_adversarial: need at least one query");
  const double delta = config.delta > 0.0 ? config.delta : config.gap / (4.0 * config.lipschitz);

  ResistingOracle oracle(config.lipschitz, config.dim);
  algo.reset(config.dim);
  Vector x = Vector::Zero(config.dim);
  for (int t = 0; t < config.queries; ++t) {
    const OracleAnswer answer = oracle.query(x);
    if (t + 1 < config.queries) x = algo.next(x, answer);
  }

  AdversaryReport report;
  report.transcript = oracle.transcript();
  const ResistingFunction f = materialize(report.transcript, config.lipschitz, config.gap);
  report.radius = f.radius();
  report.zero_respect = check_zero_respecting(report.transcript);
  report.consistency = verify_consistency(f, report.transcript, 10000, config.seed);
  report.nonstationarity =
      verify_nonstationary(f, report.transcript.queries, delta, config.eps, config.n_samples, config.seed);

  // Per-row zero-respecting flag: query t stays inside the revealed support.
  const auto& queries = report.transcript.queries;
  std::vector<bool> revealed(static_cast<std::size_t>(config.dim), false);
  for (std::size_t t = 0; t < queries.size(); ++t) {
    AdversaryRow row;
    row.t = static_cast<int>(t);
    row.qx_norm = queries[t].norm();
    row.consistent = report.consistency.centers[t].status;
    for (Eigen::Index j = 0; j < queries[t].size(); ++j) {
      if (queries[t][j] != 0.0 && (t == 0 || !revealed[static_cast<std::size_t>(j)])) row.zero_respecting = false;
    }
    const Vector& g = report.transcript.answers[t].subgradient;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      if (g[j] != 0.0) revealed[static_cast<std::size_t>(j)] = true;
    }
    row.gmn_estimate = report.nonstationarity.estimates[t];
    row.threshold = report.nonstationarity.threshold;
    report.rows.push_back(row);
  }
  return report;
}

void write_adversary_csv(std::ostream& out, const AdversaryReport& report) {
  out << "t,qx_norm,consistent,zero_respecting,gmn_estimate,threshold\n";
  char buf[256];
  for (const AdversaryRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%s,%d,%.17g,%.17g\n", r.t, r.qx_norm,
                  std::string(to_string(r.consistent)).c_str(), r.zero_respecting ? 1 : 0, r.gmn_estimate,
                  r.threshold);
    out << buf;
  }
}

}  // namespace glab

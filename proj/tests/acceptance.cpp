// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "glab/adversary.hpp"
#include "glab/circuit.hpp"
#include "glab/goldstein.hpp"
#include "glab/instances.hpp"
#include "glab/minnorm.hpp"
#include "support.hpp"

#ifndef GLAB_CLI_PATH
#define GLAB_CLI_PATH "glab"
#endif

using namespace glab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::string format(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string format(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

int failures = 0;

void run(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0 && secs > time_limit) {
    out.pass = false;
    out.detail += format(" [over time limit %.0f s]", time_limit);
  }
  std::printf("%s %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs);
  for (const std::string& n : out.notes) std::printf("        %s\n", n.c_str());
  std::fflush(stdout);
  failures += out.pass ? 0 : 1;
}

Vector scalar(double v) { return Vector::Constant(1, v); }

// ---- 1 ---------------------------------------------------------------------

Outcome smoothing_closeness() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> dims(1, 4), sizes(6, 40);
  double worst_ratio = 0.0;
  int violations = 0, cases = 0;
  for (int c = 0; c < 20; ++c) {
    const int d = dims(rng);
    const Circuit f = testing::random_circuit(rng, d, sizes(rng), false);
    for (int n : {5, 10, 20}) {
      const Circuit g = smooth_transform(f, n).first;
      const double bound = std::ldexp(1.0, -n);
      double worst = 0.0;
      for (int i = 0; i < 1000; ++i) {
        const Vector x = testing::random_vector(rng, d, -2, 2);
        worst = std::max(worst, std::abs(f.evaluate(x) - g.evaluate(x)));
      }
      violations += worst > bound;
      worst_ratio = std::max(worst_ratio, worst / bound);
      ++cases;
    }
  }
  return {violations == 0, format("%d circuit/N cases, max |f-g| / 2^-N = %.3g, violations %d", cases,
                                  worst_ratio, violations)};
}

// ---- 2 ---------------------------------------------------------------------

Outcome smoothing_regularity() {
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> dims(1, 4), sizes(6, 40);
  std::uniform_real_distribution<double> log_scale(-6, 0);
  long lip_bad = 0, smooth_bad = 0, pairs = 0;
  double worst_lip = 0.0, worst_smooth_exp = -1e300;
  for (int c = 0; c < 20; ++c) {
    const int d = dims(rng);
    const Circuit f = testing::random_circuit(rng, d, sizes(rng), false);
    const int n = 10;
    const auto [g, params] = smooth_transform(f, n);
    const double lip = recursive_lipschitz(f).overall;
    const double smooth_bound = std::ldexp(1.0, 3 * f.size() + n);
    for (int i = 0; i < 10000; ++i) {
      const Vector x = testing::random_vector(rng, d, -2, 2);
      Vector dir = testing::random_vector(rng, d);
      if (dir.norm() == 0.0) continue;
      const Vector y = x + std::pow(10.0, log_scale(rng)) * dir;
      const double dx = (x - y).norm();
      if (dx == 0.0) continue;
      ++pairs;
      const double q0 = std::abs(g.evaluate(x) - g.evaluate(y)) / dx;
      const double q1 = (g.gradient(x) - g.gradient(y)).norm() / dx;
      if (std::abs(g.evaluate(x) - g.evaluate(y)) > lip * dx * (1 + 1e-12) + 1e-12) ++lip_bad;
      if (q1 > smooth_bound) ++smooth_bad;
      if (lip > 0) worst_lip = std::max(worst_lip, q0 / lip);
      if (q1 > 0) worst_smooth_exp = std::max(worst_smooth_exp, std::log2(q1) - (3 * f.size() + n));
    }
  }
  return {lip_bad == 0 && smooth_bad == 0,
          format("%ld pairs, max quotient/L = %.6f, max log2(grad quotient) - M = %.1f, violations %ld + %ld", pairs,
                 worst_lip, worst_smooth_exp, lip_bad, smooth_bad)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome gradient_correctness() {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> dims(1, 4), sizes(6, 50);
  double worst = 0.0;
  int bad = 0;
  for (int c = 0; c < 20; ++c) {
    const int d = dims(rng);
    const Circuit g = testing::random_circuit(rng, d, sizes(rng), true);
    for (int i = 0; i < 100; ++i) {
      const double e = testing::fd_relative_error(g, testing::random_vector(rng, d, -2, 2));
      worst = std::max(worst, e);
      bad += e > 1e-5;
    }
  }
  return {bad == 0, format("2000 points, max relative error %.3g (limit 1e-5)", worst)};
}

// ---- 4 ---------------------------------------------------------------------

Outcome minnorm_equivalence() {
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<int> pick(1, 4);
  double worst_diff = 0.0, worst_gap = 0.0;
  int bad = 0;
  for (int s = 0; s < 200; ++s) {
    const int k = pick(rng), d = pick(rng);
    std::vector<Vector> w;
    double scale = 0.0;
    for (int i = 0; i < k; ++i) {
      w.push_back(testing::random_vector(rng, d));
      scale = std::max(scale, w.back().squaredNorm());
    }
    const MinNormResult r = min_norm_point(w);
    const double diff = std::abs(r.point.norm() - testing::brute_force_min_norm(w, 1e-3));
    const double gap_ratio = scale > 0 ? r.wolfe_gap / (kDefaultMinNormTol * scale) : 0.0;
    worst_diff = std::max(worst_diff, diff);
    worst_gap = std::max(worst_gap, gap_ratio);
    bad += diff > 2e-3 || gap_ratio > 1.0;
  }
  return {bad == 0, format("200 sets, max norm difference %.3g (limit 2e-3), max Wolfe gap / tol %.3g", worst_diff,
                           worst_gap)};
}

// ---- 5 ---------------------------------------------------------------------

Outcome solver_budgets() {
  const QuadOracle q(2);
  const double delta = 0.1, eps = 0.1, gap = 0.5, lip = 1.0;
  const SolverConfig cfg = SolverConfig::with_bounds(delta, eps, 1000, 0.0, lip);
  const SolverReport rep = solve(q, (Vector(2) << 1, 0).finished(), cfg);
  const int outer_limit = static_cast<int>(std::ceil(2 * gap / (delta * eps)));
  int bad_steps = 0, accepted = 0;
  for (const TraceRow& r : rep.trace) {
    if (!r.accepted) continue;
    ++accepted;
    bad_steps += r.decrease < 0.5 * delta * r.gnorm;
  }
  int bad_contractions = 0;
  for (const ContractionCheck& c : rep.contractions) bad_contractions += !(c.ok && c.separating);
  const double bound = oracle_call_bound(gap, lip, 0.0, delta, eps);
  const bool ok = rep.status == SolveStatus::kGoldsteinStationary &&
                  static_cast<int>(rep.trace.size()) <= outer_limit && bad_steps == 0 && bad_contractions == 0 &&
                  rep.total_calls() <= bound;
  return {ok, format("%s after %zu outer iterations (limit %d), %d accepted steps, %d decrease violations, "
                     "%zu/%zu contraction checks ok, %ld oracle calls (bound %.4g)",
                     std::string(to_string(rep.status)).c_str(), rep.trace.size(), outer_limit, accepted, bad_steps,
                     rep.contractions.size() - bad_contractions, rep.contractions.size(), rep.total_calls(), bound)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome solver_kink() {
  const CircuitOracle f(smooth_transform(absval_circuit(), 20).first, 1.0);
  const double delta = 0.1, eps = 0.05;
  const SolverConfig cfg = SolverConfig::with_bounds(delta, eps, 1000, *f.meta().smoothness_exp, 1.0);
  const SolverReport rep = solve(f, scalar(1.0), cfg);

  // Goldstein set in 1-D: the interval of derivatives over [x - delta, x + delta].
  auto goldstein_norm = [&](double x) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 400; ++i) {
      const double d = f.subgradient(scalar(x - delta + 2 * delta * i / 400.0))[0];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return lo <= 0.0 && hi >= 0.0 ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  };
  double widest = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -2.0 + 4.0 * i / 2000.0;
    if (goldstein_norm(x) <= eps) widest = std::max(widest, std::abs(x));
  }
  const double x_final = rep.final_point[0];
  const bool ok = rep.status == SolveStatus::kGoldsteinStationary && std::abs(x_final) <= 0.2 && widest <= 0.2;
  return {ok, format("%s at x = %.3g, all grid stationary points within |x| <= %.3g (window 0.2)",
                     std::string(to_string(rep.status)).c_str(), x_final, widest)};
}

// ---- 7 ---------------------------------------------------------------------

Outcome convex_replay() {
  Outcome out;
  out.pass = true;
  std::string detail;
  const double params[2][3] = {{3, 1, 0.1}, {3, 1, 0.3}};
  for (const auto& p : params) {
    const double lip = p[0], radius = p[1], eps = p[2];
    GradientStepper sgd(radius / lip, true);
    const int dim = convex_hard_min_dim(lip, radius, eps);
    const ConvexLbTrace tr = simulate_convex_lb(lip, radius, eps, dim, sgd);
    const double floor_gap = lip * radius / (6.0 * std::sqrt(tr.horizon + 1.0));
    std::string below;
    double min_gap = 1e300;
    bool floor_ok = true;
    for (const ConvexLbRow& r : tr.rows) {
      min_gap = std::min(min_gap, r.gap);
      if (r.gap < eps) below += (below.empty() ? "" : ",") + std::to_string(r.t);
      floor_ok = floor_ok && r.gap >= floor_gap - 1e-15;
    }
    out.pass = out.pass && tr.gaps_ok && tr.supports_ok;
    if (!detail.empty()) detail += "; ";
    detail += format("(L,R,eps)=(%g,%g,%g) horizon %d: min gap %.6g, support ok %s", lip, radius, eps, tr.horizon,
                     min_gap, tr.supports_ok ? "yes" : "no");
    if (!below.empty()) detail += ", gap < eps at t=" + below;
    out.notes.push_back(format("(L,R,eps)=(%g,%g,%g): f(0)-f* = LR/(6 sqrt(T)) = %.6g with T = %d; gap >= that "
                               "floor at every t: %s",
                               lip, radius, eps, floor_gap, tr.horizon + 1, floor_ok ? "yes" : "no"));
  }
  out.detail = detail;
  return out;
}

// ---- 8 ---------------------------------------------------------------------

Outcome resisting_harness() {
  AdversaryConfig cfg;
  cfg.dim = 2;
  cfg.lipschitz = 7.0;
  cfg.gap = 1.0;
  cfg.queries = 50;
  cfg.delta = cfg.gap / (4 * cfg.lipschitz);
  cfg.n_samples = 256;
  cfg.seed = 0;
  auto gd = make_stepper("gd");
  const AdversaryReport rep = run_adversarial(*gd, cfg);
  double min_est = 1e300;
  for (double e : rep.nonstationarity.estimates) min_est = std::min(min_est, e);
  const double threshold = cfg.lipschitz / 252.0;
  const bool ok = rep.rows.size() == 50 && rep.consistency.ok && !rep.consistency.conditional &&
                  rep.consistency.max_value_error <= 1e-12 && rep.consistency.max_gradient_error <= 1e-12 &&
                  rep.consistency.lipschitz_ok && min_est >= threshold - 1e-6 && rep.zero_respect.ok;
  return {ok, format("50 iterates, answer errors %.2g/%.2g, sampled Lipschitz ratio %.6f (L=7), "
                     "min estimate %.6f vs L/252 = %.6f",
                     rep.consistency.max_value_error, rep.consistency.max_gradient_error,
                     rep.consistency.max_lipschitz_ratio, min_est, threshold)};
}

// ---- 9 ---------------------------------------------------------------------

Outcome bump_construction() {
  std::mt19937_64 rng(1009);
  std::uniform_int_distribution<int> count(1, 20);
  std::uniform_real_distribution<double> where(-2, 2), radius(0.05, 0.6);
  int bad_slope = 0, bad_range = 0, bad_lip = 0, bad_goldstein = 0;
  double worst_lip = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> q(static_cast<std::size_t>(count(rng)));
    for (double& v : q) v = where(rng);
    const double xhat = where(rng);
    const BumpFunction1D f = bump1d(q, xhat, radius(rng));
    for (double v : q) bad_slope += f.derivative_at(v) != 1.0;

    const double lo = std::min(*std::min_element(q.begin(), q.end()), xhat) - 1.5;
    const double hi = std::max(*std::max_element(q.begin(), q.end()), xhat) + 1.5;
    const int steps = 400000;
    const double h = (hi - lo) / steps;
    double prev = f.value_at(lo);
    for (int i = 1; i <= steps; ++i) {
      const double v = f.value_at(lo + i * h);
      bad_range += std::abs(v) > 1.0;
      const double quotient = std::abs(v - prev) / h;
      worst_lip = std::max(worst_lip, quotient);
      bad_lip += quotient > 1 + 1e-9;
      prev = v;
    }

    const GoldsteinEstimate est = estimate_goldstein_min_norm(f, scalar(xhat), f.delta(), 256, 0);
    bool all_one = std::abs(est.value - 1.0) <= 1e-12;
    for (const Vector& g : est.gradients) all_one = all_one && std::abs(g[0] - 1.0) <= 1e-12;
    for (int i = 0; i <= 1000; ++i) {
      all_one = all_one && f.derivative_at(xhat - f.delta() + 2 * f.delta() * i / 1000.0) == 1.0;
    }
    bad_goldstein += !all_one;
  }
  const bool ok = bad_slope == 0 && bad_range == 0 && bad_lip == 0 && bad_goldstein == 0;
  return {ok, format("10 query sets: slope-1 failures %d, range failures %d, grid Lipschitz max %.12f, "
                     "Goldstein set != {1} in %d",
                     bad_slope, bad_range, worst_lip, bad_goldstein)};
}

// ---- 10 --------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("glab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = GLAB_CLI_PATH;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"adversary", "adversary --algo gd --T 50 --seed 7 --out "},
      {"adversary-grid", "adversary --algo grid --T 10 --seed 3 --out "},
      {"solve-quad", "solve --instance quad --delta 0.1 --eps 0.1 --trace "},
      {"solve-absval", "solve --instance absval -N 20 --delta 0.1 --eps 0.05 --trace "},
      {"convex-lb", "convex-lb --L 3 --R 1 --eps 0.3 --out "},
  };
  int identical = 0, produced = 0;
  std::string mismatched;
  for (const auto& [name, args] : commands) {
    std::string first;
    bool same = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / (name + "_" + std::to_string(rep) + ".csv");
      const std::string cmd = "\"" + cli + "\" " + args + "\"" + out.string() + "\" >/dev/null 2>&1";
      std::system(cmd.c_str());
      if (!fs::exists(out)) {
        same = false;
        continue;
      }
      const std::string body = slurp(out);
      if (rep == 0) {
        first = body;
        ++produced;
      } else {
        same = same && body == first && !body.empty();
      }
    }
    if (same) {
      ++identical;
    } else {
      mismatched += " " + name;
    }
  }
  // GLAB_SEED must override --seed.
  const fs::path a = dir / "env_a.csv", b = dir / "env_b.csv";
  std::system(("GLAB_SEED=11 \"" + cli + "\" adversary --algo gd --T 8 --seed 1 --out \"" + a.string() +
               "\" >/dev/null 2>&1")
                  .c_str());
  std::system(("GLAB_SEED=11 \"" + cli + "\" adversary --algo gd --T 8 --seed 2 --out \"" + b.string() +
               "\" >/dev/null 2>&1")
                  .c_str());
  const bool env_ok = fs::exists(a) && fs::exists(b) && slurp(a) == slurp(b);
  fs::remove_all(dir);
  const bool ok = identical == static_cast<int>(commands.size()) && env_ok;
  return {ok, format("%d/%zu commands byte-identical across runs, GLAB_SEED override %s%s", identical,
                     commands.size(), env_ok ? "ok" : "broken", mismatched.empty() ? "" : (", differing:" + mismatched).c_str())};
}

}  // namespace

int main() {
  run(1, "smoothing closeness", 10, smoothing_closeness);
  run(2, "smoothing Lipschitz and smoothness", 0, smoothing_regularity);
  run(3, "gradient correctness", 0, gradient_correctness);
  run(4, "min-norm oracle equivalence", 0, minnorm_equivalence);
  run(5, "solver budgets on quad", 5, solver_budgets);
  run(6, "solver on smoothed kink", 5, solver_kink);
  run(7, "convex lower-bound replay", 5, convex_replay);
  run(8, "resisting harness", 30, resisting_harness);
  run(9, "1-D bump construction", 10, bump_construction);
  run(10, "CLI determinism", 0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

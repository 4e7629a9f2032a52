// glab: smooth circuits, run the Goldstein solver and the lower-bound harnesses.
//
// Exit codes: 0 success or stationary, 1 runtime error, 2 parse error,
// 3 outer budget exhausted, 4 solver stalled, 5 claim falsified, 64 usage.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "glab/adversary.hpp"
#include "glab/algorithms.hpp"
#include "glab/circuit.hpp"
#include "glab/errors.hpp"
#include "glab/goldstein.hpp"
#include "glab/instances.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitStalled = 4;
constexpr int kExitFalsified = 5;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vector(const glab::Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a sibling temp file so a failed run leaves no partial output.
void write_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    body(out);
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + path);
    }
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t resolve_seed(std::uint64_t flag) {
  const char* env = std::getenv("GLAB_SEED");
  if (env == nullptr || *env == '\0') return flag;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw UsageError(std::string("GLAB_SEED is not an unsigned integer: ") + env);
  return v;
}

// ---- smooth ---------------------------------------------------------------

struct SmoothArgs {
  std::string circuit;
  int n = 0;
  std::string out;
};

int run_smooth(const SmoothArgs& a) {
  const glab::Circuit c = glab::parse_circuit(read_file(a.circuit));
  const auto [g, params] = glab::smooth_transform(c, a.n);
  const glab::LipschitzReport lip = glab::recursive_lipschitz(c);
  if (!a.out.empty()) write_output(a.out, [&](std::ostream& o) { o << glab::emit_circuit(g); });
  std::cout << "s=" << c.size() << "\n"
            << "p=" << c.depth() << "\n"
            << "d=" << c.dim() << "\n"
            << "max_gates=" << c.count(glab::GateKind::kMax) << "\n"
            << "L=" << fmt(lip.overall) << "\n"
            << "N=" << params.closeness_exp << "\n"
            << "a=2^" << params.sharpness_exp << "\n"
            << "M=" << params.smoothness_exp << "\n";
  return kExitOk;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string circuit;
  std::string instance;
  std::optional<int> n;
  double delta = 0.0;
  double eps = 0.0;
  int max_outer = 1000;
  std::vector<double> x0;
  int dim = 2;
  double gap = 1.0;
  std::string trace;
};

int run_solve(const SolveArgs& a) {
  std::shared_ptr<const glab::FunctionOracle> oracle;
  glab::Vector x0;

  auto from_circuit = [&](const glab::Circuit& c) {
    glab::Circuit used = c;
    if (a.n) used = glab::smooth_transform(c, *a.n).first;
    oracle = std::make_shared<glab::CircuitOracle>(std::move(used), a.gap);
    x0 = glab::Vector::Zero(c.dim());
  };

  if (!a.circuit.empty()) {
    from_circuit(glab::parse_circuit(read_file(a.circuit)));
  } else if (a.instance == "quad") {
    oracle = std::make_shared<glab::QuadOracle>(a.dim);
    x0 = glab::Vector::Zero(a.dim);
    x0[0] = 1.0;
  } else if (a.instance == "absval") {
    from_circuit(glab::absval_circuit());
    x0 = glab::Vector::Ones(1);
  } else if (a.instance == "convexhard" || a.instance == "resisting") {
    throw glab::ContractError("instance '" + a.instance + "' is nonsmooth; use the convex-lb or adversary command");
  } else {
    throw UsageError("unknown instance '" + a.instance + "' (quad, absval, convexhard, resisting)");
  }

  if (!a.x0.empty()) {
    if (static_cast<int>(a.x0.size()) != oracle->dim()) {
      throw UsageError("--x0 has " + std::to_string(a.x0.size()) + " entries, expected " +
                       std::to_string(oracle->dim()));
    }
    x0 = Eigen::Map<const glab::Vector>(a.x0.data(), static_cast<Eigen::Index>(a.x0.size()));
  }

  const glab::OracleMeta meta = oracle->meta();
  if (!meta.smoothness_exp) {
    throw glab::ContractError("circuit has hard max gates; pass -N to smooth it first");
  }
  const glab::SolverConfig cfg =
      glab::SolverConfig::with_bounds(a.delta, a.eps, a.max_outer, *meta.smoothness_exp, meta.lipschitz);
  const glab::SolverReport rep = glab::solve(*oracle, x0, cfg);

  if (!a.trace.empty()) write_output(a.trace, [&](std::ostream& o) { glab::write_trace_csv(o, rep.trace); });

  std::cout << "status=" << glab::to_string(rep.status) << "\n"
            << "outer_iterations=" << rep.trace.size() << "\n"
            << "final_point=" << fmt_vector(rep.final_point) << "\n"
            << "final_value=" << fmt(rep.final_value) << "\n"
            << "final_minnorm=" << fmt(rep.final_minnorm) << "\n"
            << "calls0=" << rep.calls0 << "\n"
            << "calls1=" << rep.calls1 << "\n"
            << "max_bisect_iters=" << rep.max_bisect_iters << "\n"
            << "L=" << fmt(meta.lipschitz) << "\n"
            << "M=" << fmt(*meta.smoothness_exp) << "\n";
  if (!rep.message.empty()) std::cerr << "glab: " << rep.message << "\n";

  switch (rep.status) {
    case glab::SolveStatus::kGoldsteinStationary:
      return kExitOk;
    case glab::SolveStatus::kOuterBudgetExhausted:
      return kExitBudget;
    case glab::SolveStatus::kInnerStalled:
    case glab::SolveStatus::kBisectStalled:
      return kExitStalled;
  }
  return kExitError;
}

// ---- adversary ------------------------------------------------------------

struct AdversaryArgs {
  std::string algo;
  glab::AdversaryConfig cfg;
  std::uint64_t seed = 0;
  std::string out;
};

int run_adversary(const AdversaryArgs& a) {
  auto algo = glab::make_stepper(a.algo);
  if (!algo) throw UsageError("unknown algo '" + a.algo + "' (gd, sgd, grid)");
  glab::AdversaryConfig cfg = a.cfg;
  cfg.seed = resolve_seed(a.seed);
  const glab::AdversaryReport rep = glab::run_adversarial(*algo, cfg);

  write_output(a.out, [&](std::ostream& o) { glab::write_adversary_csv(o, rep); });

  // Off-axis iterates are outside what the construction certifies, so only
  // rows marked consistent can falsify anything.
  bool falsified = !rep.consistency.gap_ok || (!rep.consistency.lipschitz_ok && !rep.consistency.conditional);
  int conditional_rows = 0;
  for (const glab::AdversaryRow& r : rep.rows) {
    if (r.consistent == glab::Consistency::kInconsistent) falsified = true;
    if (r.consistent == glab::Consistency::kConditional) ++conditional_rows;
    if (r.consistent == glab::Consistency::kConsistent && r.gmn_estimate < r.threshold - 1e-6) falsified = true;
  }
  std::cerr << "radius=" << fmt(rep.radius) << " conditional_rows=" << conditional_rows
            << " zero_respecting=" << (rep.zero_respect.ok ? 1 : 0)
            << " lipschitz_ok=" << (rep.consistency.lipschitz_ok ? 1 : 0)
            << " certified=" << (rep.certified() ? 1 : 0) << "\n";
  if (!rep.consistency.diagnostic.empty()) std::cerr << "glab: " << rep.consistency.diagnostic << "\n";
  return falsified ? kExitFalsified : kExitOk;
}

// ---- convex-lb ------------------------------------------------------------

struct ConvexArgs {
  double lipschitz = 0.0;
  double radius = 0.0;
  double eps = 0.0;
  std::string algo = "sgd";
  std::optional<double> step;
  std::optional<int> dim;
  std::string out;
};

int run_convex_lb(const ConvexArgs& a) {
  if (!(a.lipschitz > 0.0 && a.radius > 0.0 && a.eps > 0.0)) throw UsageError("--L, --R and --eps must be positive");
  std::unique_ptr<glab::Stepper> algo;
  const double step = a.step.value_or(a.radius / a.lipschitz);
  if (a.algo == "gd") {
    algo = std::make_unique<glab::GradientStepper>(step, false);
  } else if (a.algo == "sgd") {
    algo = std::make_unique<glab::GradientStepper>(step, true);
  } else if (a.algo == "grid") {
    algo = glab::make_stepper("grid");
  } else {
    throw UsageError("unknown algo '" + a.algo + "' (gd, sgd, grid)");
  }
  const int dim = a.dim.value_or(glab::convex_hard_min_dim(a.lipschitz, a.radius, a.eps));
  const glab::ConvexLbTrace tr = glab::simulate_convex_lb(a.lipschitz, a.radius, a.eps, dim, *algo);

  write_output(a.out, [&](std::ostream& o) {
    o << "t,gap,support_size\n";
    char buf[96];
    for (const glab::ConvexLbRow& r : tr.rows) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%d\n", r.t, r.gap, r.support_size);
      o << buf;
    }
  });

  int short_rows = 0;
  for (const glab::ConvexLbRow& r : tr.rows) short_rows += r.gap < tr.eps ? 1 : 0;
  std::cerr << "horizon=" << tr.horizon << " dim=" << dim << " gaps_below_eps=" << short_rows
            << " supports_ok=" << (tr.supports_ok ? 1 : 0) << "\n";
  return tr.gaps_ok && tr.supports_ok ? kExitOk : kExitFalsified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goldstein stationarity lab: circuit smoothing, solver and lower-bound harnesses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "glab 0.1.0");

  SmoothArgs smooth;
  auto* cmd_smooth = app.add_subcommand("smooth", "Replace max gates by softmax with error <= 2^-N");
  cmd_smooth->add_option("--circuit", smooth.circuit, "Circuit source file")->required();
  cmd_smooth->add_option("-N", smooth.n, "Closeness exponent")->required();
  cmd_smooth->add_option("--out", smooth.out, "Where to write the smoothed circuit");

  SolveArgs solve;
  auto* cmd_solve = app.add_subcommand("solve", "Run the modified Goldstein subgradient method");
  auto* opt_circuit = cmd_solve->add_option("--circuit", solve.circuit, "Circuit source file");
  auto* opt_instance = cmd_solve->add_option("--instance", solve.instance, "Built-in instance: quad, absval");
  opt_circuit->excludes(opt_instance);
  cmd_solve->add_option("-N", solve.n, "Smooth the circuit with this closeness exponent");
  cmd_solve->add_option("--delta", solve.delta, "Goldstein radius")->required();
  cmd_solve->add_option("--eps", solve.eps, "Target min-norm")->required();
  cmd_solve->add_option("--T", solve.max_outer, "Outer iteration cap")->capture_default_str();
  cmd_solve->add_option("--x0", solve.x0, "Start point, comma separated")->delimiter(',');
  cmd_solve->add_option("--dim", solve.dim, "Dimension of the quad instance")->capture_default_str();
  cmd_solve->add_option("--Delta", solve.gap, "Declared value gap of a circuit")->capture_default_str();
  cmd_solve->add_option("--trace", solve.trace, "Trace CSV output");

  AdversaryArgs adv;
  auto* cmd_adv = app.add_subcommand("adversary", "Drive an algorithm against the resisting oracle");
  cmd_adv->add_option("--algo", adv.algo, "gd, sgd or grid")->required();
  cmd_adv->add_option("--T", adv.cfg.queries, "Number of queries")->capture_default_str();
  cmd_adv->add_option("--L", adv.cfg.lipschitz, "Lipschitz constant")->capture_default_str();
  cmd_adv->add_option("--Delta", adv.cfg.gap, "Value gap")->capture_default_str();
  cmd_adv->add_option("--delta", adv.cfg.delta, "Goldstein radius (default Delta/(4L))");
  cmd_adv->add_option("--eps", adv.cfg.eps, "Target min-norm")->capture_default_str();
  cmd_adv->add_option("--dim", adv.cfg.dim, "Dimension")->capture_default_str();
  cmd_adv->add_option("--samples", adv.cfg.n_samples, "Estimator samples per iterate")->capture_default_str();
  cmd_adv->add_option("--seed", adv.seed, "Estimator seed (GLAB_SEED overrides)")->capture_default_str();
  cmd_adv->add_option("--out", adv.out, "CSV output (stdout when absent)");

  ConvexArgs cvx;
  auto* cmd_cvx = app.add_subcommand("convex-lb", "Replay the convex hard instance against a stepper");
  cmd_cvx->add_option("--L", cvx.lipschitz, "Lipschitz constant")->required();
  cmd_cvx->add_option("--R", cvx.radius, "Distance to the optimum")->required();
  cmd_cvx->add_option("--eps", cvx.eps, "Target accuracy")->required();
  cmd_cvx->add_option("--algo", cvx.algo, "gd, sgd or grid")->capture_default_str();
  cmd_cvx->add_option("--step", cvx.step, "Step size (default R/L)");
  cmd_cvx->add_option("--dim", cvx.dim, "Dimension (default the smallest admissible)");
  cmd_cvx->add_option("--out", cvx.out, "CSV output (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_smooth) return run_smooth(smooth);
    if (*cmd_solve) {
      if (solve.circuit.empty() && solve.instance.empty()) throw UsageError("solve needs --circuit or --instance");
      return run_solve(solve);
    }
    if (*cmd_adv) return run_adversary(adv);
    if (*cmd_cvx) return run_convex_lb(cvx);
  } catch (const UsageError& e) {
    std::cerr << "glab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const glab::ParseError& e) {
    std::cerr << "glab: parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "glab: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

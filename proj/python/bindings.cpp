#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "glab/adversary.hpp"
#include "glab/algorithms.hpp"
#include "glab/circuit.hpp"
#include "glab/errors.hpp"
#include "glab/goldstein.hpp"
#include "glab/instances.hpp"
#include "glab/minnorm.hpp"

namespace py = pybind11;
using namespace glab;

namespace {

py::dict minnorm_dict(const MinNormResult& r) {
  py::dict d;
  d["point"] = r.point;
  d["weights"] = r.weights;
  d["wolfe_gap"] = r.wolfe_gap;
  d["major_cycles"] = r.major_cycles;
  return d;
}

py::dict smoothing_dict(const SmoothingParams& p) {
  py::dict d;
  d["closeness_exp"] = p.closeness_exp;
  d["sharpness_exp"] = p.sharpness_exp;
  d["sharpness"] = p.sharpness;
  d["smoothness_exp"] = p.smoothness_exp;
  return d;
}

py::dict meta_dict(const OracleMeta& m) {
  py::dict d;
  d["lipschitz"] = m.lipschitz;
  d["gap"] = m.gap;
  d["smoothness_exp"] = m.smoothness_exp;
  return d;
}

py::dict report_dict(const SolverReport& r) {
  py::dict d;
  d["status"] = std::string(to_string(r.status));
  d["x"] = r.final_point;
  d["value"] = r.final_value;
  d["minnorm"] = r.final_minnorm;
  d["witness"] = minnorm_dict(r.witness);
  d["witness_points"] = r.witness_points;
  d["calls0"] = r.calls0;
  d["calls1"] = r.calls1;
  d["max_bisect_iters"] = r.max_bisect_iters;
  d["message"] = r.message;
  py::list trace;
  for (const TraceRow& row : r.trace) {
    py::dict t;
    t["k"] = row.k;
    t["f"] = row.f;
    t["gnorm"] = row.gnorm;
    t["w_size"] = row.w_size;
    t["inner_iters"] = row.inner_iters;
    t["calls0"] = row.calls0;
    t["calls1"] = row.calls1;
    t["accepted"] = row.accepted;
    t["decrease"] = row.decrease;
    trace.append(t);
  }
  d["trace"] = trace;
  py::list checks;
  for (const ContractionCheck& c : r.contractions) {
    py::dict t;
    t["k"] = c.k;
    t["gnorm_sq"] = c.gnorm_sq;
    t["next_gnorm_sq"] = c.next_gnorm_sq;
    t["bound"] = c.bound;
    t["separating"] = c.separating;
    t["ok"] = c.ok;
    checks.append(t);
  }
  d["contractions"] = checks;
  return d;
}

py::dict adversary_dict(const AdversaryReport& r) {
  py::dict d;
  d["certified"] = r.certified();
  d["radius"] = r.radius;
  d["queries"] = r.transcript.queries;
  d["zero_respecting"] = r.zero_respect.ok;
  d["first_violation"] = r.zero_respect.first_violation;
  const ConsistencyReport& c = r.consistency;
  py::dict cons;
  cons["ok"] = c.ok;
  cons["conditional"] = c.conditional;
  cons["max_value_error"] = c.max_value_error;
  cons["max_gradient_error"] = c.max_gradient_error;
  cons["max_axis_residual"] = c.max_axis_residual;
  cons["value_gap"] = c.value_gap;
  cons["gap_ok"] = c.gap_ok;
  cons["max_lipschitz_ratio"] = c.max_lipschitz_ratio;
  cons["lipschitz_ok"] = c.lipschitz_ok;
  cons["diagnostic"] = c.diagnostic;
  d["consistency"] = cons;
  d["threshold"] = r.nonstationarity.threshold;
  py::list rows;
  for (const AdversaryRow& row : r.rows) {
    py::dict t;
    t["t"] = row.t;
    t["qx_norm"] = row.qx_norm;
    t["consistent"] = std::string(to_string(row.consistent));
    t["zero_respecting"] = row.zero_respecting;
    t["gmn_estimate"] = row.gmn_estimate;
    t["threshold"] = row.threshold;
    rows.append(t);
  }
  d["rows"] = rows;
  std::ostringstream csv;
  write_adversary_csv(csv, r);
  d["csv"] = csv.str();
  return d;
}

std::unique_ptr<Stepper> stepper_for(const std::string& algo, std::optional<double> step) {
  if (step) {
    if (algo == "gd") return std::make_unique<GradientStepper>(*step, false);
    if (algo == "sgd") return std::make_unique<GradientStepper>(*step, true);
  }
  auto s = make_stepper(algo);
  if (!s) throw ContractError("unknown algorithm '" + algo + "' (expected gd, sgd or grid)");
  return s;
}

}  // namespace

PYBIND11_MODULE(_glab, m) {
  m.doc() = "Goldstein stationarity toolkit: circuits, smoothing, min-norm points and hard instances.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<MinNormStalled>(m, "MinNormStalled", error.ptr());
  py::register_exception<BisectStalled>(m, "BisectStalled", error.ptr());
  py::register_exception<ZeroRespectViolation>(m, "ZeroRespectViolation", error.ptr());

  py::class_<FunctionOracle, std::shared_ptr<FunctionOracle>>(m, "Oracle")
      .def_property_readonly("dim", &FunctionOracle::dim)
      .def("value", &FunctionOracle::value, py::arg("x"))
      .def("subgradient", &FunctionOracle::subgradient, py::arg("x"))
      .def("__call__", &FunctionOracle::value, py::arg("x"))
      .def_property_readonly("meta", [](const FunctionOracle& o) { return meta_dict(o.meta()); });

  py::class_<Circuit>(m, "Circuit")
      .def_static("parse", &parse_circuit, py::arg("text"))
      .def("evaluate", &Circuit::evaluate, py::arg("x"))
      .def("gradient", &Circuit::gradient, py::arg("x"))
      .def("__call__", &Circuit::evaluate, py::arg("x"))
      .def("emit", &emit_circuit)
      .def_property_readonly("dim", &Circuit::dim)
      .def_property_readonly("size", &Circuit::size)
      .def_property_readonly("depth", &Circuit::depth)
      .def_property_readonly("input_names", &Circuit::input_names)
      .def_property_readonly("max_gates", [](const Circuit& c) { return c.count(GateKind::kMax); })
      .def_property_readonly("smax_gates", [](const Circuit& c) { return c.count(GateKind::kSmax); })
      .def("__repr__", [](const Circuit& c) {
        return "<Circuit dim=" + std::to_string(c.dim()) + " size=" + std::to_string(c.size()) + ">";
      });

  m.def("parse_circuit", &parse_circuit, py::arg("text"));
  m.def("emit_circuit", &emit_circuit, py::arg("circuit"));
  m.def(
      "smooth",
      [](const Circuit& c, int n) {
        auto [g, p] = smooth_transform(c, n);
        return py::make_tuple(g, smoothing_dict(p));
      },
      py::arg("circuit"), py::arg("N"), "Replace every max gate; returns (circuit, params).");
  m.def(
      "lipschitz", [](const Circuit& c) { return recursive_lipschitz(c).overall; }, py::arg("circuit"));
  m.def("smoothness_exponent", &smoothness_exponent, py::arg("circuit"));
  m.def("softmax", &softmax, py::arg("alpha"), py::arg("z1"), py::arg("z2"));
  m.def("absval_circuit", &absval_circuit);

  m.def(
      "min_norm_point",
      [](const std::vector<Vector>& w, double tol) { return minnorm_dict(min_norm_point(w, tol)); },
      py::arg("vectors"), py::arg("tol") = kDefaultMinNormTol);

  py::class_<QuadOracle, FunctionOracle, std::shared_ptr<QuadOracle>>(m, "QuadOracle")
      .def(py::init<int>(), py::arg("dim") = 2);
  py::class_<CircuitOracle, FunctionOracle, std::shared_ptr<CircuitOracle>>(m, "CircuitOracle")
      .def(py::init<Circuit, double>(), py::arg("circuit"), py::arg("gap") = 1.0)
      .def_property_readonly("circuit", &CircuitOracle::circuit);
  py::class_<CallableOracle, FunctionOracle, std::shared_ptr<CallableOracle>>(m, "CallableOracle")
      .def(py::init([](int dim, CallableOracle::ValueFn f, CallableOracle::GradFn g, double lipschitz, double gap,
                       std::optional<double> smoothness_exp) {
             return std::make_shared<CallableOracle>(dim, std::move(f), std::move(g),
                                                     OracleMeta{lipschitz, gap, smoothness_exp});
           }),
           py::arg("dim"), py::arg("value"), py::arg("gradient"), py::arg("lipschitz") = 1.0, py::arg("gap") = 1.0,
           py::arg("smoothness_exp") = std::nullopt);
  py::class_<ConvexHardInstance, FunctionOracle, std::shared_ptr<ConvexHardInstance>>(m, "ConvexHardInstance")
      .def(py::init<double, double, double, int>(), py::arg("L"), py::arg("R"), py::arg("eps"), py::arg("dim"))
      .def_property_readonly("horizon", &ConvexHardInstance::horizon)
      .def("optimum_point", &ConvexHardInstance::optimum_point)
      .def("optimum_value", &ConvexHardInstance::optimum_value);
  py::class_<ResistingFunction, FunctionOracle, std::shared_ptr<ResistingFunction>>(m, "ResistingFunction")
      .def(py::init<std::vector<Vector>, double, double>(), py::arg("centers"), py::arg("L") = 7.0,
           py::arg("Delta") = 1.0)
      .def_property_readonly("radius", &ResistingFunction::radius)
      .def_property_readonly("centers", &ResistingFunction::centers);
  py::class_<BumpFunction1D, FunctionOracle, std::shared_ptr<BumpFunction1D>>(m, "BumpFunction1D")
      .def_property_readonly("xhat", &BumpFunction1D::xhat)
      .def_property_readonly("delta", &BumpFunction1D::delta)
      .def_property_readonly("eta", &BumpFunction1D::eta)
      .def_property_readonly("radius", &BumpFunction1D::radius)
      .def("value_at", &BumpFunction1D::value_at, py::arg("x"))
      .def("derivative_at", &BumpFunction1D::derivative_at, py::arg("x"));
  py::class_<RotatedOracle, FunctionOracle, std::shared_ptr<RotatedOracle>>(m, "RotatedOracle")
      .def_property_readonly("matrix", &RotatedOracle::matrix);

  m.def(
      "bump1d",
      [](std::vector<double> q, double xhat, double delta, std::optional<double> eta) {
        return std::make_shared<BumpFunction1D>(bump1d(std::move(q), xhat, delta, eta));
      },
      py::arg("queries"), py::arg("xhat"), py::arg("delta"), py::arg("eta") = std::nullopt);
  m.def(
      "rotate",
      [](std::shared_ptr<FunctionOracle> base, Matrix u) {
        return std::make_shared<RotatedOracle>(rotate(std::move(base), std::move(u)));
      },
      py::arg("oracle"), py::arg("U"));

  m.def(
      "solve",
      [](const FunctionOracle& f, const Vector& x0, double delta, double eps, int max_outer,
         std::optional<double> smoothness_exp) {
        const OracleMeta meta = f.meta();
        const std::optional<double> m_exp = smoothness_exp ? smoothness_exp : meta.smoothness_exp;
        if (!m_exp) throw ContractError("solve needs a smooth oracle or an explicit smoothness_exp");
        const SolverConfig cfg = SolverConfig::with_bounds(delta, eps, max_outer, *m_exp, meta.lipschitz);
        return report_dict(solve(f, x0, cfg));
      },
      py::arg("oracle"), py::arg("x0"), py::arg("delta"), py::arg("eps"), py::arg("max_outer") = 1000,
      py::arg("smoothness_exp") = std::nullopt);
  m.def("oracle_call_bound", &oracle_call_bound, py::arg("gap"), py::arg("L"), py::arg("M"), py::arg("delta"),
        py::arg("eps"));

  m.def(
      "estimate_goldstein_min_norm",
      [](const FunctionOracle& f, const Vector& x, double delta, int n, std::uint64_t seed) {
        const GoldsteinEstimate e = estimate_goldstein_min_norm(f, x, delta, n, seed);
        py::dict d;
        d["value"] = e.value;
        d["minnorm"] = minnorm_dict(e.minnorm);
        d["points"] = e.points;
        d["gradients"] = e.gradients;
        return d;
      },
      py::arg("oracle"), py::arg("x"), py::arg("delta"), py::arg("n_samples") = 256, py::arg("seed") = 0);

  m.def(
      "run_adversarial",
      [](const std::string& algo, int queries, double lipschitz, double gap, double delta, double eps, int dim,
         int n_samples, std::uint64_t seed, std::optional<double> step) {
        AdversaryConfig cfg;
        cfg.queries = queries;
        cfg.lipschitz = lipschitz;
        cfg.gap = gap;
        cfg.delta = delta;
        cfg.eps = eps;
        cfg.dim = dim;
        cfg.n_samples = n_samples;
        cfg.seed = seed;
        auto s = stepper_for(algo, step);
        return adversary_dict(run_adversarial(*s, cfg));
      },
      py::arg("algo") = "gd", py::arg("T") = 50, py::arg("L") = 7.0, py::arg("Delta") = 1.0, py::arg("delta") = 0.0,
      py::arg("eps") = 0.02, py::arg("dim") = 2, py::arg("n_samples") = 256, py::arg("seed") = 0,
      py::arg("step") = std::nullopt);

  m.def(
      "simulate_convex_lb",
      [](double lipschitz, double radius, double eps, const std::string& algo, std::optional<double> step,
         std::optional<int> dim) {
        auto s = stepper_for(algo, step ? step : std::optional<double>(radius / lipschitz));
        const ConvexLbTrace tr =
            simulate_convex_lb(lipschitz, radius, eps, dim.value_or(convex_hard_min_dim(lipschitz, radius, eps)), *s);
        py::dict d;
        d["horizon"] = tr.horizon;
        d["gaps_ok"] = tr.gaps_ok;
        d["supports_ok"] = tr.supports_ok;
        std::vector<int> t, support;
        std::vector<double> gap;
        for (const ConvexLbRow& r : tr.rows) {
          t.push_back(r.t);
          gap.push_back(r.gap);
          support.push_back(r.support_size);
        }
        d["t"] = t;
        d["gap"] = gap;
        d["support_size"] = support;
        return d;
      },
      py::arg("L"), py::arg("R"), py::arg("eps"), py::arg("algo") = "sgd", py::arg("step") = std::nullopt,
      py::arg("dim") = std::nullopt);
  m.def("convex_hard_min_dim", &convex_hard_min_dim, py::arg("L"), py::arg("R"), py::arg("eps"));
}

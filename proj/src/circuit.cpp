#include "glab/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "glab/errors.hpp"

namespace glab {

namespace {

// exp() overflows beyond this magnitude.
constexpr double kExpClamp = 745.0;

bool in_unit_interval(double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; }

int arity(GateKind kind) {
  switch (kind) {
    case GateKind::kInput:
    case GateKind::kConst:
      return 0;
    case GateKind::kScale:
    case GateKind::kOutput:
      return 1;
    case GateKind::kAdd:
    case GateKind::kMax:
    case GateKind::kSmax:
      return 2;
  }
  return 0;
}

}  // namespace

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kInput:
      return "input";
    case GateKind::kConst:
      return "const";
    case GateKind::kScale:
      return "scale";
    case GateKind::kAdd:
      return "add";
    case GateKind::kMax:
      return "max";
    case GateKind::kSmax:
      return "smax";
    case GateKind::kOutput:
      return "output";
  }
  return "?";
}

double softmax(double alpha, double z1, double z2) {
  const double hi = std::max(z1, z2);
  const double spread = std::abs(z1 - z2);
  return hi + std::log1p(std::exp(-alpha * spread)) / alpha;
}

double softmax_weight(double alpha, double z1, double z2) {
  const double t = std::clamp(alpha * (z1 - z2), -kExpClamp, kExpClamp);
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

Circuit::Circuit(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ContractError("circuit has no nodes");

  std::unordered_set<std::string> names;
  std::vector<int> fan_out(nodes_.size(), 0);
  std::vector<int> longest(nodes_.size(), 0);

  for (int i = 0; i < size(); ++i) {
    Node& node = nodes_[i];
    const std::string where = "node " + std::to_string(i) + " (" + std::string(to_string(node.kind)) + ")";

    if (node.kind != GateKind::kOutput) {
      if (node.name.empty()) throw ContractError(where + ": empty name");
      if (!names.insert(node.name).second) throw ContractError(where + ": duplicate name '" + node.name + "'");
    }

    const int n_operands = arity(node.kind);
    const int operands[2] = {node.lhs, node.rhs};
    for (int k = 0; k < 2; ++k) {
      const int src = operands[k];
      if (k < n_operands) {
        if (src < 0 || src >= i) throw ContractError(where + ": operand must reference an earlier node");
        if (nodes_[src].kind == GateKind::kOutput) throw ContractError(where + ": output node cannot feed other nodes");
        ++fan_out[src];
        longest[i] = std::max(longest[i], longest[src] + 1);
      } else if (src != -1) {
        throw ContractError(where + ": fan-in violation");
      }
    }

    switch (node.kind) {
      case GateKind::kInput:
        node.input_index = dim_++;
        input_names_.push_back(node.name);
        break;
      case GateKind::kConst:
        if (!in_unit_interval(node.param)) throw ContractError(where + ": constant out of range [-1, 1]");
        break;
      case GateKind::kScale:
        if (!in_unit_interval(node.param)) throw ContractError(where + ": scale factor out of range [-1, 1]");
        break;
      case GateKind::kSmax:
        if (!(node.param > 0.0) || !std::isfinite(node.param)) throw ContractError(where + ": softmax sharpness must be positive");
        break;
      case GateKind::kOutput:
        if (output_ != -1) throw ContractError(where + ": duplicate output");
        output_ = i;
        break;
      default:
        break;
    }
    if (node.kind != GateKind::kInput) node.input_index = -1;
  }

  if (output_ == -1) throw ContractError("circuit has no output");
  depth_ = *std::max_element(longest.begin(), longest.end());
}

int Circuit::count(GateKind kind) const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [kind](const Node& n) { return n.kind == kind; }));
}

void Circuit::check_dim(const Vector& x) const {
  if (x.size() != dim_) {
    throw ContractError("dimension mismatch: circuit has " + std::to_string(dim_) + " inputs, point has " +
                        std::to_string(x.size()));
  }
}

void Circuit::forward(const Vector& x, std::vector<double>& tape) const {
  tape.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case GateKind::kInput:
        tape[i] = x[n.input_index];
        break;
      case GateKind::kConst:
        tape[i] = n.param;
        break;
      case GateKind::kScale:
        tape[i] = n.param * tape[n.lhs];
        break;
      case GateKind::kAdd:
        tape[i] = tape[n.lhs] + tape[n.rhs];
        break;
      case GateKind::kMax:
        tape[i] = std::max(tape[n.lhs], tape[n.rhs]);
        break;
      case GateKind::kSmax:
        tape[i] = softmax(n.param, tape[n.lhs], tape[n.rhs]);
        break;
      case GateKind::kOutput:
        tape[i] = tape[n.lhs];
        break;
    }
  }
}

double Circuit::evaluate(const Vector& x) const {
  check_dim(x);
  std::vector<double> tape;
  forward(x, tape);
  return tape[output_];
}

OracleAnswer Circuit::evaluate_with_gradient(const Vector& x) const {
  check_dim(x);
  std::vector<double> tape;
  forward(x, tape);

  std::vector<double> adjoint(nodes_.size(), 0.0);
  adjoint[output_] = 1.0;
  Vector grad = Vector::Zero(dim_);
  for (int i = output_; i >= 0; --i) {
    const double a = adjoint[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    switch (n.kind) {
      case GateKind::kInput:
        grad[n.input_index] += a;
        break;
      case GateKind::kConst:
        break;
      case GateKind::kScale:
        adjoint[n.lhs] += n.param * a;
        break;
      case GateKind::kAdd:
        adjoint[n.lhs] += a;
        adjoint[n.rhs] += a;
        break;
      case GateKind::kMax:
        // Ties go to the first operand.
        adjoint[tape[n.lhs] >= tape[n.rhs] ? n.lhs : n.rhs] += a;
        break;
      case GateKind::kSmax: {
        const double w = softmax_weight(n.param, tape[n.lhs], tape[n.rhs]);
        adjoint[n.lhs] += w * a;
        adjoint[n.rhs] += (1.0 - w) * a;
        break;
      }
      case GateKind::kOutput:
        adjoint[n.lhs] += a;
        break;
    }
  }
  return {tape[output_], std::move(grad)};
}

Vector Circuit::gradient(const Vector& x) const { return evaluate_with_gradient(x).subgradient; }

LipschitzReport recursive_lipschitz(const Circuit& circuit) {
  const auto& nodes = circuit.nodes();
  LipschitzReport report;
  report.per_node.resize(nodes.size(), 0.0);
  auto& lip = report.per_node;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    switch (n.kind) {
      case GateKind::kInput:
        lip[i] = 1.0;
        break;
      case GateKind::kConst:
        lip[i] = 0.0;
        break;
      case GateKind::kScale:
        lip[i] = std::abs(n.param) * lip[n.lhs];
        break;
      case GateKind::kAdd:
        lip[i] = lip[n.lhs] + lip[n.rhs];
        break;
      case GateKind::kMax:
      case GateKind::kSmax:
        lip[i] = std::max(lip[n.lhs], lip[n.rhs]);
        break;
      case GateKind::kOutput:
        lip[i] = lip[n.lhs];
        break;
    }
  }
  report.overall = lip[circuit.output()];
  return report;
}

std::pair<Circuit, SmoothingParams> smooth_transform(const Circuit& circuit, int closeness_exp) {
  if (circuit.count(GateKind::kSmax) > 0) throw ContractError("circuit already contains smax gates");
  if (closeness_exp < 1) throw ContractError("closeness exponent N must be >= 1");

  const int s = circuit.size();
  // Largest finite power of two is 2^1023.
  if (closeness_exp > 1023 - s) throw ContractError("smoothing budget unrepresentable");

  SmoothingParams params;
  params.closeness_exp = closeness_exp;
  params.sharpness_exp = closeness_exp + s;
  params.sharpness = std::ldexp(1.0, params.sharpness_exp);
  params.smoothness_exp = 3 * s + closeness_exp;

  std::vector<Node> nodes = circuit.nodes();
  for (Node& n : nodes) {
    if (n.kind == GateKind::kMax) {
      n.kind = GateKind::kSmax;
      n.param = params.sharpness;
    }
  }
  return {Circuit(std::move(nodes)), params};
}

std::optional<double> smoothness_exponent(const Circuit& circuit) {
  if (circuit.count(GateKind::kMax) > 0) return std::nullopt;
  double max_alpha = 0.0;
  for (const Node& n : circuit.nodes()) {
    if (n.kind == GateKind::kSmax) max_alpha = std::max(max_alpha, n.param);
  }
  if (max_alpha == 0.0) return 0.0;
  return std::max(0.0, std::ceil(std::log2(max_alpha))) + 2.0 * circuit.size();
}

CircuitOracle::CircuitOracle(Circuit circuit, double gap) : circuit_(std::move(circuit)) {
  meta_.lipschitz = recursive_lipschitz(circuit_).overall;
  meta_.gap = gap;
  meta_.smoothness_exp = smoothness_exponent(circuit_);
}

}  // namespace glab

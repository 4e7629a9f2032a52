#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "glab/oracle.hpp"

namespace glab {

enum class GateKind { kInput, kConst, kScale, kAdd, kMax, kSmax, kOutput };

std::string_view to_string(GateKind kind);

/// One node of a linear arithmetic circuit. Operands are node indices that
/// precede this node, so node order is a topological order.
struct Node {
  GateKind kind = GateKind::kInput;
  std::string name;
  int lhs = -1;
  int rhs = -1;
  /// const value, scale factor, or softmax sharpness depending on kind.
  double param = 0.0;
  /// 0-based coordinate for input nodes.
  int input_index = -1;
};

/// Sharpness and guarantees recorded by smooth_transform.
struct SmoothingParams {
  int closeness_exp = 0;  ///< N: |f - g| <= 2^-N
  int sharpness_exp = 0;  ///< log2 of the softmax sharpness a = 2^(N + s(C))
  double sharpness = 0.0;
  int smoothness_exp = 0;  ///< M = 3 s(C) + N: g is 2^M-smooth
};

struct LipschitzReport {
  std::vector<double> per_node;
  double overall = 0.0;
};

/// Validated DAG over {input, const, scale, add, max, smax, output}.
///
/// Immutable once built; evaluate and gradient are pure and re-entrant.
class Circuit {
 public:
  /// Validates fan-in, operand order, parameter ranges and the single output.
  /// Throws ContractError on violation.
  explicit Circuit(std::vector<Node> nodes);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  /// Longest path (in edges) from any source to the output.
  int depth() const { return depth_; }
  int output() const { return output_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::string>& input_names() const { return input_names_; }

  int count(GateKind kind) const;

  double evaluate(const Vector& x) const;

  /// One Clarke subgradient; hard-max ties send the adjoint to the first operand.
  Vector gradient(const Vector& x) const;

  /// Value and subgradient from a single forward tape.
  OracleAnswer evaluate_with_gradient(const Vector& x) const;

 private:
  void check_dim(const Vector& x) const;
  void forward(const Vector& x, std::vector<double>& tape) const;

  std::vector<Node> nodes_;
  std::vector<std::string> input_names_;
  int dim_ = 0;
  int output_ = -1;
  int depth_ = 0;
};

/// Parses the line-oriented circuit format. Throws ParseError.
Circuit parse_circuit(std::string_view text);

/// Serializes a circuit; parse_circuit(emit_circuit(c)) reproduces c.
std::string emit_circuit(const Circuit& circuit);

LipschitzReport recursive_lipschitz(const Circuit& circuit);

/// Replaces every max gate with softmax of sharpness 2^(N + s(C)).
/// Throws ContractError if smax gates are present, N < 1, or the sharpness
/// exponent leaves the double range.
std::pair<Circuit, SmoothingParams> smooth_transform(const Circuit& circuit, int closeness_exp);

/// (1/alpha) ln(exp(alpha z1) + exp(alpha z2)) in overflow-free form.
double softmax(double alpha, double z1, double z2);

/// d softmax / d z1 = logistic(alpha (z1 - z2)); d/dz2 is one minus this.
double softmax_weight(double alpha, double z1, double z2);

/// Smoothness exponent implied by the gates: empty with any hard max, 0 for
/// max-free circuits, otherwise ceil(log2(max alpha)) + 2 s(C). For the output
/// of smooth_transform this equals 3 s(C) + N.
std::optional<double> smoothness_exponent(const Circuit& circuit);

/// FunctionOracle over a circuit. Lipschitz constant is the recursive one;
/// smoothness comes from smoothness_exponent.
class CircuitOracle final : public FunctionOracle {
 public:
  CircuitOracle(Circuit circuit, double gap);

  int dim() const override { return circuit_.dim(); }
  double value(const Vector& x) const override { return circuit_.evaluate(x); }
  Vector subgradient(const Vector& x) const override { return circuit_.gradient(x); }
  OracleMeta meta() const override { return meta_; }

  const Circuit& circuit() const { return circuit_; }

 private:
  Circuit circuit_;
  OracleMeta meta_;
};

}  // namespace glab

// Text format for linear arithmetic circuits.
//
//   input <name>
//   const <name> <c>            c in [-1, 1]
//   scale <name> <src> <zeta>   zeta in [-1, 1]
//   add   <name> <a> <b>
//   max   <name> <a> <b>
//   smax  <name> <a> <b> <alpha>   alpha written as a hex float
//   output <name>
//
// One statement per line, '#' starts a comment. Operands must be defined on an
// earlier line, which makes the statement order a topological order.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "glab/circuit.hpp"
#include "glab/errors.hpp"

namespace glab {

namespace {

struct Token {
  std::string_view text;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != '#' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!(std::isalpha(head) || s[0] == '_')) return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_')) return false;
  }
  return true;
}

class Parser {
 public:
  Circuit run(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      statement(line_no, tokenize(line));
      pos = end + 1;
    }
    if (output_line_ == 0) throw ParseError(line_no, 1, "missing output statement");
    try {
      return Circuit(std::move(nodes_));
    } catch (const ContractError& e) {
      throw ParseError(line_no, 1, e.what());
    }
  }

 private:
  void statement(int line, const std::vector<Token>& tokens) {
    if (tokens.empty()) return;
    const std::string_view keyword = tokens[0].text;

    auto expect = [&](std::size_t n) {
      if (tokens.size() != n) {
        const int col = tokens.size() > n ? tokens[n].column : tokens.back().column;
        throw ParseError(line, col,
                         "'" + std::string(keyword) + "' expects " + std::to_string(n - 1) + " argument(s)");
      }
    };

    Node node;
    if (keyword == "input") {
      expect(2);
      node.kind = GateKind::kInput;
    } else if (keyword == "const") {
      expect(3);
      node.kind = GateKind::kConst;
      node.param = number(line, tokens[2]);
      if (!(node.param >= -1.0 && node.param <= 1.0)) throw ParseError(line, tokens[2].column, "constant out of range [-1, 1]");
    } else if (keyword == "scale") {
      expect(4);
      node.kind = GateKind::kScale;
      node.lhs = lookup(line, tokens[2]);
      node.param = number(line, tokens[3]);
      if (!(node.param >= -1.0 && node.param <= 1.0)) throw ParseError(line, tokens[3].column, "scale factor out of range [-1, 1]");
    } else if (keyword == "add" || keyword == "max") {
      expect(4);
      node.kind = keyword == "add" ? GateKind::kAdd : GateKind::kMax;
      node.lhs = lookup(line, tokens[2]);
      node.rhs = lookup(line, tokens[3]);
    } else if (keyword == "smax") {
      expect(5);
      node.kind = GateKind::kSmax;
      node.lhs = lookup(line, tokens[2]);
      node.rhs = lookup(line, tokens[3]);
      node.param = number(line, tokens[4]);
      if (!(node.param > 0.0)) throw ParseError(line, tokens[4].column, "softmax sharpness must be positive");
    } else if (keyword == "output") {
      expect(2);
      if (output_line_ != 0) {
        throw ParseError(line, tokens[0].column, "duplicate output (first on line " + std::to_string(output_line_) + ")");
      }
      output_line_ = line;
      node.kind = GateKind::kOutput;
      node.lhs = lookup(line, tokens[1]);
      nodes_.push_back(std::move(node));
      return;
    } else {
      throw ParseError(line, tokens[0].column, "unknown statement '" + std::string(keyword) + "'");
    }

    const Token& name = tokens[1];
    if (!valid_name(name.text)) throw ParseError(line, name.column, "invalid name '" + std::string(name.text) + "'");
    if (!index_.emplace(std::string(name.text), static_cast<int>(nodes_.size())).second) {
      throw ParseError(line, name.column, "duplicate name '" + std::string(name.text) + "'");
    }
    node.name = std::string(name.text);
    nodes_.push_back(std::move(node));
  }

  int lookup(int line, const Token& token) const {
    auto it = index_.find(std::string(token.text));
    if (it == index_.end()) {
      throw ParseError(line, token.column, "undefined name '" + std::string(token.text) + "' (forward references are not allowed)");
    }
    return it->second;
  }

  static double number(int line, const Token& token) {
    const std::string s(token.text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty() || !std::isfinite(v)) {
      throw ParseError(line, token.column, "invalid number '" + s + "'");
    }
    return v;
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> index_;
  int output_line_ = 0;
};

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

Circuit parse_circuit(std::string_view text) { return Parser().run(text); }

std::string emit_circuit(const Circuit& circuit) {
  const auto& nodes = circuit.nodes();
  std::string out;
  for (const Node& n : nodes) {
    out += to_string(n.kind);
    switch (n.kind) {
      case GateKind::kInput:
        out += " " + n.name;
        break;
      case GateKind::kConst:
        out += " " + n.name + " " + format_double("%.17g", n.param);
        break;
      case GateKind::kScale:
        out += " " + n.name + " " + nodes[n.lhs].name + " " + format_double("%.17g", n.param);
        break;
      case GateKind::kAdd:
      case GateKind::kMax:
        out += " " + n.name + " " + nodes[n.lhs].name + " " + nodes[n.rhs].name;
        break;
      case GateKind::kSmax:
        out += " " + n.name + " " + nodes[n.lhs].name + " " + nodes[n.rhs].name + " " + format_double("%a", n.param);
        break;
      case GateKind::kOutput:
        out += " " + nodes[n.lhs].name;
        break;
    }
    out += '\n';
  }
  return out;
}

}  // namespace glab

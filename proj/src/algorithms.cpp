#include "glab/algorithms.hpp"

#include <cmath>
#include <vector>

#include "glab/errors.hpp"

namespace glab {

Vector GradientStepper::next(const Vector& x, const OracleAnswer& answer) {
  const double eta = diminishing_ ? step_ / std::sqrt(static_cast<double>(t_) + 1.0) : step_;
  ++t_;
  return x - eta * answer.subgradient;
}

void GridStepper::reset(int dim) {
  if (dim < 2) throw ContractError("grid stepper needs dimension >= 2");
  dim_ = dim;
  t_ = 0;
}

Vector GridStepper::next(const Vector&, const OracleAnswer&) {
  ++t_;
  Vector x = Vector::Zero(dim_);
  x[0] = spacing_ * (t_ % columns_);
  x[1] = spacing_ * (t_ / columns_);
  return x;
}

std::unique_ptr<Stepper> make_stepper(std::string_view name) {
  if (name == "gd") return std::make_unique<GradientStepper>(0.01);
  if (name == "sgd") return std::make_unique<GradientStepper>(0.1, true);
  if (name == "grid") return std::make_unique<GridStepper>(0.1, 4);
  return nullptr;
}

ZeroRespectReport check_zero_respecting(std::span<const Vector> queries, std::span<const Vector> gradients) {
  ZeroRespectReport report;
  if (queries.empty()) throw ContractError("check_zero_respecting: empty transcript");
  const auto d = queries[0].size();

  for (Eigen::Index j = 0; j < d; ++j) {
    if (queries[0][j] != 0.0) {
      report.ok = false;
      report.first_violation = {0, static_cast<int>(j) + 1};
      return report;
    }
  }

  std::vector<bool> revealed(static_cast<std::size_t>(d), false);
  for (std::size_t t = 1; t < queries.size(); ++t) {
    if (t - 1 < gradients.size()) {
      const Vector& g = gradients[t - 1];
      for (Eigen::Index j = 0; j < d; ++j) {
        if (g[j] != 0.0) revealed[static_cast<std::size_t>(j)] = true;
      }
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      if (queries[t][j] != 0.0 && !revealed[static_cast<std::size_t>(j)]) {
        report.ok = false;
        report.first_violation = {static_cast<int>(t), static_cast<int>(j) + 1};
        return report;
      }
    }
  }
  return report;
}

}  // namespace glab

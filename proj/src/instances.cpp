#include "glab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "glab/errors.hpp"
#include "glab/sampling.hpp"

namespace glab {

namespace {

// floor() that tolerates representation error in quotients such as
// (3 / 0.1)^2 / 36, which should floor to 25.
int floor_rounded(double v) { return static_cast<int>(std::floor(v * (1.0 + 1e-12) + 1e-12)); }

int support_size(const Vector& x) { return static_cast<int>((x.array() != 0.0).count()); }

}  // namespace

double QuadOracle::value(const Vector& x) const {
  const double n = x.norm();
  return n <= 1.0 ? 0.5 * n * n : n - 0.5;
}

Vector QuadOracle::subgradient(const Vector& x) const {
  const double n = x.norm();
  return n <= 1.0 ? Vector(x) : Vector(x / n);
}

Circuit absval_circuit() { return parse_circuit("input x\nscale n x -1\nmax m x n\noutput m\n"); }

int convex_hard_min_dim(double lipschitz, double radius, double eps) {
  const double ratio = lipschitz * radius / eps;
  return floor_rounded(10.0 * ratio * ratio) + 1;
}

ConvexHardInstance::ConvexHardInstance(double lipschitz, double radius, double eps, int dim)
    : lipschitz_(lipschitz), radius_(radius), eps_(eps), dim_(dim) {
  if (!(lipschitz > 0.0 && radius > 0.0 && eps > 0.0)) throw ContractError("convex_hard: L, R, eps must be positive");
  const double ratio = lipschitz * radius / eps;
  active_ = floor_rounded(ratio * ratio / 36.0) + 1;
  const int needed = convex_hard_min_dim(lipschitz, radius, eps);
  if (dim < needed) {
    throw ContractError("convex_hard: dimension " + std::to_string(dim) + " too small, need >= " + std::to_string(needed));
  }
}

double ConvexHardInstance::value(const Vector& x) const {
  const double top = x.head(active_).maxCoeff();
  return lipschitz_ / 3.0 * top + lipschitz_ / (6.0 * radius_ * std::sqrt(active_)) * x.squaredNorm();
}

Vector ConvexHardInstance::subgradient(const Vector& x) const {
  Eigen::Index first = 0;
  x.head(active_).maxCoeff(&first);  // Eigen returns the first maximizer.
  Vector g = lipschitz_ / (3.0 * radius_ * std::sqrt(active_)) * x;
  g[first] += lipschitz_ / 3.0;
  return g;
}

OracleMeta ConvexHardInstance::meta() const { return {lipschitz_, -optimum_value(), std::nullopt}; }

Vector ConvexHardInstance::optimum_point() const {
  Vector x = Vector::Zero(dim_);
  x.head(active_).setConstant(-radius_ / std::sqrt(active_));
  return x;
}

double ConvexHardInstance::optimum_value() const { return -lipschitz_ * radius_ / (6.0 * std::sqrt(active_)); }

ConvexLbTrace simulate_convex_lb(double lipschitz, double radius, double eps, int dim, Stepper& algo) {
  const ConvexHardInstance f(lipschitz, radius, eps, dim);
  const double f_star = f.optimum_value();

  ConvexLbTrace trace;
  trace.horizon = f.horizon();
  trace.eps = eps;

  algo.reset(dim);
  std::vector<Vector> queries{Vector::Zero(dim)};
  std::vector<Vector> gradients;
  for (int t = 0; t <= trace.horizon; ++t) {
    const Vector& x = queries.back();
    const OracleAnswer answer = f.query(x);
    ConvexLbRow row{t, answer.value - f_star, support_size(x)};
    trace.gaps_ok = trace.gaps_ok && row.gap >= eps;
    trace.supports_ok = trace.supports_ok && row.support_size <= t;
    trace.rows.push_back(row);
    gradients.push_back(answer.subgradient);
    if (t == trace.horizon) break;

    queries.push_back(algo.next(x, answer));
    const ZeroRespectReport zr = check_zero_respecting(queries, gradients);
    if (!zr.ok) throw ZeroRespectViolation(zr.first_violation->first, zr.first_violation->second);
  }
  return trace;
}

ResistingFunction::ResistingFunction(std::vector<Vector> centers, double lipschitz, double gap)
    : centers_(std::move(centers)), lipschitz_(lipschitz), gap_(gap) {
  if (!(lipschitz > 0.0 && gap > 0.0)) throw ContractError("resisting_fn: L and Delta must be positive");
  if (centers_.size() < 2) throw ContractError("resisting_fn: need at least two distinct centers");
  dim_ = static_cast<int>(centers_[0].size());
  if (dim_ < 2) throw ContractError("resisting_fn: dimension must be >= 2");
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (centers_[i].size() != dim_) throw ContractError("resisting_fn: centers differ in dimension");
    for (std::size_t j = 0; j < i; ++j) closest = std::min(closest, (centers_[i] - centers_[j]).norm());
  }
  if (!(closest > 0.0)) throw ContractError("resisting_fn: duplicate centers");
  radius_ = 0.25 * closest;
}

int ResistingFunction::owner(const Vector& x) const {
  // Balls are disjoint since r is a quarter of the closest pair distance.
  const double r2 = radius_ * radius_;
  for (std::size_t t = 0; t < centers_.size(); ++t) {
    if ((x - centers_[t]).squaredNorm() <= r2) return static_cast<int>(t);
  }
  return -1;
}

double ResistingFunction::h(const Vector& x) const {
  const int t = owner(x);
  if (t < 0) return x[1];
  const Vector z = x - centers_[t];
  const double m = z.squaredNorm() / (radius_ * radius_);
  return m * x[1] + (1.0 - m) * z[0];
}

Vector ResistingFunction::h_gradient(const Vector& x) const {
  Vector g = Vector::Zero(dim_);
  const int t = owner(x);
  if (t < 0) {
    g[1] = 1.0;
    return g;
  }
  const double r2 = radius_ * radius_;
  const Vector z = x - centers_[t];
  const double m = z.squaredNorm() / r2;
  g = (2.0 * x[1] / r2) * z - (2.0 * z[0] / r2) * z;
  g[1] += m;
  g[0] += 1.0 - m;
  return g;
}

double ResistingFunction::value(const Vector& x) const {
  return lipschitz_ / 7.0 * std::max(h(x), -7.0 * gap_ / lipschitz_);
}

Vector ResistingFunction::subgradient(const Vector& x) const {
  if (h(x) < -7.0 * gap_ / lipschitz_) return Vector::Zero(dim_);
  return lipschitz_ / 7.0 * h_gradient(x);
}

ResistingFunction resisting_fn(std::vector<Vector> centers, double lipschitz, double gap) {
  return ResistingFunction(std::move(centers), lipschitz, gap);
}

BumpFunction1D::BumpFunction1D(std::vector<double> queries, double xhat, double delta, double eta)
    : queries_(std::move(queries)), xhat_(xhat), delta_(delta), eta_(eta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ContractError("bump1d: delta must lie in (0, 1)");
  if (!(eta > 0.0 && eta < 1.0 - delta)) throw ContractError("bump1d: eta must lie in (0, 1 - delta)");
  std::sort(queries_.begin(), queries_.end());
  queries_.erase(std::unique(queries_.begin(), queries_.end()), queries_.end());

  const double lo = xhat - delta - eta;
  const double hi = xhat + delta + eta;
  for (double q : queries_) {
    if (!std::isfinite(q)) throw ContractError("bump1d: non-finite query");
    if (q == lo || q == hi) throw ContractError("bump1d: xhat +/- (delta + eta) must not be a query");
  }

  std::vector<double> marks = queries_;
  marks.push_back(lo);
  marks.push_back(hi);
  std::sort(marks.begin(), marks.end());
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < marks.size(); ++i) closest = std::min(closest, marks[i] - marks[i - 1]);
  radius_ = std::min(0.1 * closest, delta);
}

double BumpFunction1D::value_at(double x) const {
  const double plateau = delta_ + eta_;
  const double lo = xhat_ - plateau;
  const double hi = xhat_ + plateau;
  if (x >= lo && x <= hi) return x - xhat_;
  const double r = radius_;
  auto it = std::lower_bound(queries_.begin(), queries_.end(), x - r);
  const bool near = it != queries_.end() && *it <= x + r;
  if (x > hi) {
    if (!near) return plateau;
    const double u = x - *it;
    // Dip: down on [-r, -r/4], up on [-r/4, r/2], zero slope after.
    if (u <= -0.25 * r) return plateau - (u + r);
    if (u <= 0.5 * r) return plateau - (0.5 * r - u);
    return plateau;
  }
  if (!near) return -plateau;
  const double u = x - *it;
  // Point reflection of the dip: up on [-r/2, r/4], down on [r/4, r].
  if (u < -0.5 * r) return -plateau;
  if (u <= 0.25 * r) return -plateau + (u + 0.5 * r);
  return -plateau + (r - u);
}

double BumpFunction1D::derivative_at(double x) const {
  const double plateau = delta_ + eta_;
  const double lo = xhat_ - plateau;
  const double hi = xhat_ + plateau;
  if (x >= lo && x < hi) return 1.0;
  const double r = radius_;
  auto it = std::upper_bound(queries_.begin(), queries_.end(), x - r);
  const bool near = it != queries_.end() && *it <= x + r;
  if (!near) return 0.0;
  const double u = x - *it;
  if (x >= hi) {
    if (u < -0.25 * r) return -1.0;
    if (u < 0.5 * r) return 1.0;
    return 0.0;
  }
  if (u < -0.5 * r) return 0.0;
  if (u < 0.25 * r) return 1.0;
  return -1.0;
}

BumpFunction1D bump1d(std::vector<double> queries, double xhat, double delta, std::optional<double> eta) {
  if (eta) return BumpFunction1D(std::move(queries), xhat, delta, *eta);
  if (!(delta > 0.0 && delta < 1.0)) throw ContractError("bump1d: delta must lie in (0, 1)");
  double candidate = 0.5 * (1.0 - delta);
  for (int k = 0; k < 64; ++k, candidate *= 0.5) {
    const double lo = xhat - delta - candidate;
    const double hi = xhat + delta + candidate;
    const bool clash = std::any_of(queries.begin(), queries.end(), [&](double q) { return q == lo || q == hi; });
    if (!clash) return BumpFunction1D(std::move(queries), xhat, delta, candidate);
  }
  throw ContractError("bump1d: no admissible eta found");
}

RotatedOracle::RotatedOracle(OraclePtr base, Matrix u) : base_(std::move(base)), u_(std::move(u)) {}

RotatedOracle rotate(OraclePtr base, Matrix u) {
  if (!base) throw ContractError("rotate: null oracle");
  if (u.cols() != base->dim()) throw ContractError("rotate: U must have one column per base coordinate");
  if (u.rows() < u.cols()) throw ContractError("rotate: U must be tall");
  const Matrix gram = u.transpose() * u;
  const double err = (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  if (!(err <= 1e-12)) throw ContractError("rotate: U is not column-orthonormal");
  return RotatedOracle(std::move(base), std::move(u));
}

Matrix read_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) throw ContractError("matrix: invalid entry '" + tok + "'");
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows[0].size()) throw ContractError("matrix: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ContractError("matrix: empty");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open matrix file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return read_matrix(buf.str());
}

GoldsteinEstimate estimate_goldstein_min_norm(const FunctionOracle& oracle, const Vector& x, double delta,
                                              int n_samples, std::uint64_t seed, double tol) {
  if (n_samples < 1) throw ContractError("estimate_goldstein_min_norm: need at least one sample");
  if (!(delta > 0.0)) throw ContractError("estimate_goldstein_min_norm: delta must be positive");
  GoldsteinEstimate est;
  est.points.resize(n_samples);
  est.gradients.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    est.points[i] = sample_in_ball(x, delta, seed, static_cast<std::uint64_t>(i));
    est.gradients[i] = oracle.subgradient(est.points[i]);
  }
  est.minnorm = min_norm_point(est.gradients, tol);
  est.value = est.minnorm.point.norm();
  return est;
}

}  // namespace glab

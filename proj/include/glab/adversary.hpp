#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "glab/algorithms.hpp"
#include "glab/instances.hpp"
#include "glab/oracle.hpp"

namespace glab {

/// Queries received by the resisting oracle, in order, with its answers.
struct Transcript {
  std::vector<Vector> queries;
  std::vector<OracleAnswer> answers;
  double lipschitz = 0.0;
};

/// Answers every query with (0, (L/7) e1) and records it.
class ResistingOracle {
 public:
  ResistingOracle(double lipschitz, int dim);

  OracleAnswer query(const Vector& x);
  const Transcript& transcript() const { return transcript_; }
  int dim() const { return dim_; }

 private:
  Transcript transcript_;
  int dim_;
};

ZeroRespectReport check_zero_respecting(const Transcript& transcript);

/// Deduplicates the queries (first occurrence wins) and builds the resisting
/// function over them. Throws ContractError("degenerate transcript") when
/// fewer than two distinct queries remain.
ResistingFunction materialize(const Transcript& transcript, double lipschitz, double gap);

enum class Consistency { kInconsistent = 0, kConsistent = 1, kConditional = 2 };

std::string_view to_string(Consistency c);

struct CenterCheck {
  double value_error = 0.0;
  double gradient_error = 0.0;
  /// |e2^T x^t|; nonzero iterates fall outside the consistency argument.
  double axis_residual = 0.0;
  Consistency status = Consistency::kConsistent;
};

struct ConsistencyReport {
  bool ok = false;
  /// True when all checks pass but some iterate is off the e1 axis.
  bool conditional = false;
  std::vector<CenterCheck> centers;
  double max_value_error = 0.0;
  double max_gradient_error = 0.0;
  double max_axis_residual = 0.0;
  /// f(0) - inf f from the construction: -7 Delta/L clip gives inf f = -Delta.
  double value_gap = 0.0;
  bool gap_ok = false;
  double max_lipschitz_ratio = 0.0;
  bool lipschitz_ok = false;
  std::string diagnostic;
};

/// Answers reproduced at every query to 1e-12, value gap <= Delta, and a
/// sampled Lipschitz check over `n_pairs` pairs near the centers.
ConsistencyReport verify_consistency(const ResistingFunction& f, const Transcript& transcript, int n_pairs = 10000,
                                     std::uint64_t seed = 0);

struct NonstationarityReport {
  double threshold = 0.0;
  std::vector<double> estimates;
  std::vector<bool> passed;
  bool all_passed = true;
};

/// Requires delta <= Delta/(2L); checks each estimate >= max(eps, L/252) - 1e-6.
NonstationarityReport verify_nonstationary(const ResistingFunction& f, std::span<const Vector> points, double delta,
                                           double eps, int n_samples, std::uint64_t seed);

struct AdversaryRow {
  int t = 0;
  double qx_norm = 0.0;
  Consistency consistent = Consistency::kConsistent;
  bool zero_respecting = true;
  double gmn_estimate = 0.0;
  double threshold = 0.0;
};

struct AdversaryReport {
  Transcript transcript;
  ZeroRespectReport zero_respect;
  ConsistencyReport consistency;
  NonstationarityReport nonstationarity;
  std::vector<AdversaryRow> rows;
  double radius = 0.0;

  /// Consistent, zero-respecting and non-stationary at every iterate.
  bool certified() const;
};

struct AdversaryConfig {
  int dim = 2;
  double lipschitz = 7.0;
  double gap = 1.0;
  int queries = 50;
  double delta = 0.0;  ///< 0 selects Delta/(4L)
  double eps = 0.02;
  int n_samples = 256;
  std::uint64_t seed = 0;
};

/// Drives `algo` from 0_d through `queries` resisting answers, materializes the
/// hard function and verifies it on every iterate.
AdversaryReport run_adversarial(Stepper& algo, const AdversaryConfig& config);

/// CSV with header t,qx_norm,consistent,zero_respecting,gmn_estimate,threshold.
void write_adversary_csv(std::ostream& out, const AdversaryReport& report);

}  // namespace glab

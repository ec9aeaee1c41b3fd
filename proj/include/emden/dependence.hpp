#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "emden/solver.hpp"

namespace emden {

/// Built-in parameter homotopy u_n = limit + direction / n inside the ball
/// of the given bound. Requires both the limit and limit + direction to lie
/// in the ball, which keeps every intermediate term inside by convexity.
struct AffineHomotopy {
  std::vector<double> limit;      // length T
  std::vector<double> direction;  // length T
  double bound = 0.0;             // M
};

struct ExplicitSequence {
  std::vector<Parameter> items;
  Parameter limit;
};

class ParameterSequence {
 public:
  explicit ParameterSequence(AffineHomotopy homotopy);
  explicit ParameterSequence(ExplicitSequence sequence);

  Parameter at(int n) const;  // n >= 1
  Parameter limit() const;
  /// Number of terms available; unbounded (INT_MAX) for the homotopy.
  int length() const;

 private:
  std::variant<AffineHomotopy, ExplicitSequence> rule_;
};

struct StudyRecord {
  int n = 0;
  double param_norm = 0.0;            // ||u_n||_C
  double param_dist_to_limit = 0.0;   // ||u_n - u_bar||_C
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
};

struct RateRow {
  int n = 0;
  double param_dist = 0.0;
  double x_dist = 0.0;
  double ratio = 0.0;  // x_dist / param_dist, 0 when param_dist vanishes
};

struct Certification {
  bool limit_is_critical = false;
  bool limit_is_minimizer_candidate = false;
  bool inconclusive = false;
  double gap = 0.0;  // J(x_bar, u_bar) - best multistart value at u_bar
  std::vector<RateRow> convergence_rate_table;
};

/// Least-squares fit of m(R) ~ a R^mu + b to the sphere-minima table of a
/// coercivity probe. Diagnostics only; the residual is reported, never
/// asserted.
struct CoercivityFit {
  double a = 0.0;
  double mu = 0.0;
  double b = 0.0;
  double rms = 0.0;
};

struct StudyReport {
  std::vector<StudyRecord> records;
  double uniform_bound_c = 0.0;       // max_n |x_n|
  double alpha_observed = 0.0;        // max_n J(0, u_n)
  double alpha_max_abs = 0.0;         // max_n |J(0, u_n)|
  std::vector<int> subsequence_indices;  // n values of the extracted subsequence
  Vector subsequence_representative;
  Vector x_bar;                       // certified limit candidate
  double representative_gap = 0.0;    // |representative - x_bar|
  bool tail_distances_nonincreasing = false;
  Certification certification;
  CoercivityFit fit;
  CoercivityEvidence coercivity;      // probe at the limit parameter
  // Largest gradient norm sampled over the ball of radius uniform_bound_c
  // and the sequence parameters: the bounded-derivative premise of the
  // subsequence argument, finite for every admissible nonlinearity.
  double gateaux_bound = 0.0;
  Orientation orientation = Orientation::Minimize;
  bool all_converged = false;
};

/// Runs the dependence scheme: solves the minimization problem along the
/// first `count` terms of the sequence (warm-starting each solve with the
/// previous minimizer), records the uniform bound, extracts a convergent
/// subsequence by tail clustering, solves the limit problem independently
/// and cross-certifies the limit candidate. Requires count >= 8 and a
/// context oriented so the functional is coercive.
StudyReport run_study(const ActionContext& context, const ParameterSequence& sequence,
                      int count, const SolveConfig& config);

/// Single-linkage clustering at radius tol_cluster over the tail half of the
/// list; returns the (0-based) indices of the largest cluster in original
/// order and its final element as representative. Ties prefer the cluster
/// appearing last.
std::pair<std::vector<int>, Vector> extract_convergent_subsequence(
    const std::vector<Vector>& points, double tol_cluster = 1e-4);

/// Certifies a limit candidate at u_bar: critical per verify_membership and
/// minimizer candidate when its value is within 1e-6 of an independent
/// multistart solve.
Certification certify_limit(const ActionContext& context, const Vector& x_bar,
                            const Parameter& u_bar, const SolveConfig& config);

CoercivityFit fit_coercivity_constants(const CoercivityEvidence& evidence);

}  // namespace emden

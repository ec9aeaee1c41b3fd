#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "emden/functional.hpp"

namespace emden {

struct SolveConfig {
  double grad_tol = 1e-10;    // sup-norm stop criterion, must stay below 1e-4
  int max_iters = 10000;
  int multistart_count = 16;
  double start_radius = 10.0;
  std::uint64_t seed = 0;
};

struct MinimumCluster {
  Vector x;
  double value;
};

struct SolveReport {
  Vector x_star;
  double J_star = 0.0;         // value of the oriented objective at x_star
  double grad_norm = 0.0;      // sup-norm of the oriented gradient
  double residual_norm = 0.0;  // sup-norm of the equation residual
  int starts_converged = 0;
  std::vector<MinimumCluster> distinct_minima;  // ascending value
  Orientation orientation = Orientation::Minimize;
};

struct VuCertificate {
  bool is_critical = false;
  bool is_global_candidate = false;
  double gap_to_best_start = 0.0;
  double grad_norm = 0.0;
  double residual_norm = 0.0;
};

/// Initial points for the multistart descent: the origin, the quadratic-part
/// solve -A^{-1}(g + shift) when A is nonsingular, and seeded random points
/// in the ball of start_radius, multistart_count points in total.
std::vector<Vector> generate_starts(const ActionContext& context, const SolveConfig& config);

/// Minimizes the oriented action functional from every start (plus any
/// extra_starts such as warm starts) with damped-Newton descent and Armijo
/// backtracking, falling back to gradient steps where the Hessian is
/// unusable. Callers are expected to have oriented the context so the
/// functional is coercive. Returns the best stationary point and all
/// distinct minima clustered at pairwise distance 1e-6; throws
/// NonConvergenceError with the best iterate when no start reaches grad_tol.
SolveReport minimize_action(const ActionContext& context, const Parameter& u,
                            const SolveConfig& config,
                            std::span<const Vector> extra_starts = {});

/// Exhaustive evaluation of the oriented action on the uniform grid over
/// [-box_halfwidth, box_halfwidth]^T with steps_per_axis points per axis.
/// Guarded to T <= 4 and steps_per_axis <= 201. Ties keep the
/// lexicographically first grid point.
std::pair<Vector, double> brute_force_oracle(const ActionContext& context,
                                             const Parameter& u, double box_halfwidth,
                                             int steps_per_axis);

/// Certifies a candidate: critical when gradient and residual pass their
/// tolerances, global candidate when its value is within 1e-9 of the best
/// multistart value (best iterate of a failed solve still counts as the
/// reference value).
VuCertificate verify_membership(const ActionContext& context, const Parameter& u,
                                const Vector& x, const SolveConfig& config);

struct OrientedContext {
  ActionContext context;
  CoercivityEvidence evidence;
};

/// Probes coercivity and flips the orientation when the functional is
/// anti-coercive, so that minimization is applicable. Inconclusive evidence
/// leaves the orientation unchanged.
OrientedContext orient_for_minimization(const ActionContext& context, const Parameter& u,
                                        std::span<const double> radii = kDefaultProbeRadii);

}  // namespace emden

#include "emden/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace emden {
namespace {

constexpr double kDivergenceValue = -1e18;
constexpr double kDivergenceNorm = 1e12;
constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr double kClusterDistance = 1e-6;

struct BranchResult {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// A stationary point only counts as a minimum when the Hessian has no
// clearly negative curvature (non-finite Hessians, from nonsmooth power
// terms, pass the check).
bool second_order_acceptable(const ActionContext& context, const Vector& x,
                             const Parameter& u) {
  const Eigen::MatrixXd hess = action_hessian(context, x, u);
  if (!hess.allFinite()) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) return true;
  const double scale = 1.0 + hess.cwiseAbs().maxCoeff();
  return solver.eigenvalues().minCoeff() >= -1e-7 * scale;
}

// Damped Newton with gradient fallback and Armijo backtracking.
BranchResult descend(const ActionContext& context, const Parameter& u, Vector x,
                     const SolveConfig& config) {
  BranchResult result;
  const int n = static_cast<int>(x.size());
  double value = action_value(context, x, u);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const Vector grad = action_gradient(context, x, u);
    const double grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm <= config.grad_tol) {
      result = {x, value, grad_norm, second_order_acceptable(context, x, u)};
      return result;
    }

    Vector direction = -grad;
    const Eigen::MatrixXd hess = action_hessian(context, x, u);
    if (hess.allFinite()) {
      const double diag_scale = 1.0 + hess.cwiseAbs().maxCoeff();
      for (double ridge : {0.0, 1e-10, 1e-6, 1e-2, 1.0}) {
        Eigen::LLT<Eigen::MatrixXd> llt(
            hess + ridge * diag_scale * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() != Eigen::Success) continue;
        const Vector candidate = llt.solve(-grad);
        if (candidate.allFinite() && candidate.dot(grad) < 0.0) {
          direction = candidate;
          break;
        }
      }
    }

    const double slope = grad.dot(direction);
    double step = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings) {
      const Vector trial = x + step * direction;
      double trial_value;
      try {
        trial_value = action_value(context, trial, u);
      } catch (const EvaluationError&) {
        step *= kShrink;
        continue;
      }
      if (trial_value <= value + kArmijo * step * slope) {
        x = trial;
        value = trial_value;
        accepted = true;
        break;
      }
      step *= kShrink;
    }
    if (!accepted || value < kDivergenceValue || x.norm() > kDivergenceNorm) {
      break;  // stalled line search or divergence guard
    }
  }
  const Vector grad = action_gradient(context, x, u);
  result = {x, value, grad.lpNorm<Eigen::Infinity>(), false};
  result.converged =
      result.grad_norm <= config.grad_tol && second_order_acceptable(context, x, u);
  return result;
}

}  // namespace

std::vector<Vector> generate_starts(const ActionContext& context, const SolveConfig& config) {
  const int n = context.instance.grid.interior_count;
  const auto& c = context.instance.coefficients;
  std::vector<Vector> starts;
  starts.push_back(Vector::Zero(n));

  Vector g_vec(n);
  for (int k = 1; k <= n; ++k) g_vec(k - 1) = c.g[static_cast<std::size_t>(k)];
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(context.op.matrix);
  if (lu.isInvertible()) {
    starts.push_back(lu.solve(-(g_vec + context.op.shift)));
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  while (static_cast<int>(starts.size()) < config.multistart_count) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = normal(rng);
    const double norm = d.norm();
    if (norm <= 1e-12) continue;
    const double radius =
        config.start_radius * std::pow(uniform(rng), 1.0 / static_cast<double>(n));
    starts.push_back(d * (radius / norm));
  }
  return starts;
}

SolveReport minimize_action(const ActionContext& context, const Parameter& u,
                            const SolveConfig& config,
                            std::span<const Vector> extra_starts) {
  if (!(config.grad_tol > 0.0) || !(config.grad_tol < 1e-4) || config.max_iters <= 0 ||
      config.multistart_count <= 0 || !(config.start_radius > 0.0)) {
    throw PreconditionError("invalid solve configuration");
  }
  std::vector<Vector> starts = generate_starts(context, config);
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());

  std::vector<BranchResult> results;
  results.reserve(starts.size());
  for (const Vector& start : starts) {
    results.push_back(descend(context, u, start, config));
  }

  int converged = 0;
  const BranchResult* best = nullptr;
  const BranchResult* best_any = nullptr;
  for (const BranchResult& r : results) {
    if (!best_any || r.value < best_any->value) best_any = &r;
    if (!r.converged) continue;
    ++converged;
    if (!best || r.value < best->value) best = &r;
  }
  if (!best) {
    throw NonConvergenceError("no multistart branch reached the gradient tolerance",
                              best_any->x, best_any->value, best_any->grad_norm);
  }

  SolveReport report;
  report.x_star = best->x;
  report.J_star = best->value;
  report.grad_norm = best->grad_norm;
  report.residual_norm =
      equation_residual(context.instance, best->x, u).lpNorm<Eigen::Infinity>();
  report.starts_converged = converged;
  report.orientation = context.orientation;

  std::vector<const BranchResult*> converged_results;
  for (const BranchResult& r : results) {
    if (r.converged) converged_results.push_back(&r);
  }
  std::stable_sort(converged_results.begin(), converged_results.end(),
                   [](const BranchResult* a, const BranchResult* b) {
                     return a->value < b->value;
                   });
  for (const BranchResult* r : converged_results) {
    bool merged = false;
    for (const MinimumCluster& cluster : report.distinct_minima) {
      if ((cluster.x - r->x).norm() <= kClusterDistance) {
        merged = true;
        break;
      }
    }
    if (!merged) report.distinct_minima.push_back({r->x, r->value});
  }
  return report;
}

std::pair<Vector, double> brute_force_oracle(const ActionContext& context,
                                             const Parameter& u, double box_halfwidth,
                                             int steps_per_axis) {
  const int n = context.instance.grid.interior_count;
  if (n > 4) {
    throw PreconditionError("grid oracle is limited to T <= 4, got T = " + std::to_string(n));
  }
  if (steps_per_axis < 2 || steps_per_axis > 201) {
    throw PreconditionError("steps_per_axis must be in [2, 201], got " +
                            std::to_string(steps_per_axis));
  }
  if (!(box_halfwidth > 0.0)) {
    throw PreconditionError("box_halfwidth must be positive");
  }

  const double step = 2.0 * box_halfwidth / (steps_per_axis - 1);
  Vector x(n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vector best_x = Vector::Constant(n, -box_halfwidth);
  double best_value = std::numeric_limits<double>::infinity();
  // Odometer over grid indices, first coordinate slowest: lexicographic
  // visiting order so that strict improvement keeps the first minimizer.
  while (true) {
    for (int i = 0; i < n; ++i) x(i) = -box_halfwidth + idx[static_cast<std::size_t>(i)] * step;
    const double value = action_value(context, x, u);
    if (value < best_value) {
      best_value = value;
      best_x = x;
    }
    int axis = n - 1;
    while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] == steps_per_axis) {
      idx[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return {best_x, best_value};
}

VuCertificate verify_membership(const ActionContext& context, const Parameter& u,
                                const Vector& x, const SolveConfig& config) {
  VuCertificate certificate;
  certificate.grad_norm = action_gradient(context, x, u).lpNorm<Eigen::Infinity>();
  certificate.residual_norm =
      equation_residual(context.instance, x, u).lpNorm<Eigen::Infinity>();
  certificate.is_critical =
      certificate.grad_norm <= config.grad_tol && certificate.residual_norm <= 1e-8;

  double best_value;
  try {
    best_value = minimize_action(context, u, config).J_star;
  } catch (const NonConvergenceError& failure) {
    best_value = failure.best_value();
  }
  const double value = action_value(context, x, u);
  certificate.gap_to_best_start = value - best_value;
  certificate.is_global_candidate = value <= best_value + 1e-9;
  return certificate;
}

OrientedContext orient_for_minimization(const ActionContext& context, const Parameter& u,
                                        std::span<const double> radii) {
  CoercivityEvidence evidence = coercivity_probe(context, u, radii);
  ActionContext oriented = context;
  if (evidence.direction == CoercivityDirection::AntiCoercive) {
    oriented.orientation = context.orientation == Orientation::Minimize
                               ? Orientation::MaximizeNegated
                               : Orientation::Minimize;
  }
  return {std::move(oriented), std::move(evidence)};
}

}  // namespace emden

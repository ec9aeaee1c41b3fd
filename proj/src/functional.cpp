#include "emden/functional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace emden {
namespace {

constexpr std::uint64_t kCoercivityProbeSeed = 0x5eed0c0e;
constexpr std::uint64_t kGateauxProbeSeed = 0x5eed6a7e;

double orientation_sign(const ActionContext& context) {
  return context.orientation == Orientation::MaximizeNegated ? -1.0 : 1.0;
}

std::vector<Vector> unit_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(dirs.size()) < count) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = normal(rng);
    const double norm = d.norm();
    if (norm > 1e-12) dirs.push_back(d / norm);
  }
  return dirs;
}

}  // namespace

ActionContext make_action_context(const ProblemInstance& instance) {
  ActionContext context;
  context.instance = instance;
  context.op = build_operator(instance);
  context.orientation = Orientation::Minimize;
  context.nonlinearity_sign = is_periodic(instance) ? 1.0 : -1.0;
  return context;
}

ActionContext with_orientation(ActionContext context, Orientation orientation) {
  context.orientation = orientation;
  return context;
}

double action_value(const ActionContext& context, const Vector& x, const Parameter& u) {
  const int n = context.instance.grid.interior_count;
  if (x.size() != n) {
    throw PreconditionError("action_value: x has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(n));
  }
  const auto& c = context.instance.coefficients;
  double value = 0.5 * x.dot(context.op.matrix * x) + context.op.shift.dot(x);
  for (int k = 1; k <= n; ++k) {
    value -= context.nonlinearity_sign *
             evaluate_F(context.instance, k, x(k - 1), u.values[static_cast<std::size_t>(k)]);
    value += c.g[static_cast<std::size_t>(k)] * x(k - 1);
  }
  value *= orientation_sign(context);
  if (!std::isfinite(value)) {
    throw EvaluationError("action value is not finite", 0, x.cwiseAbs().maxCoeff(), 0.0);
  }
  return value;
}

Vector action_gradient(const ActionContext& context, const Vector& x, const Parameter& u) {
  const int n = context.instance.grid.interior_count;
  if (x.size() != n) {
    throw PreconditionError("action_gradient: x has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(n));
  }
  const auto& c = context.instance.coefficients;
  Vector grad = context.op.matrix * x + context.op.shift;
  for (int k = 1; k <= n; ++k) {
    grad(k - 1) -= context.nonlinearity_sign *
                   evaluate_f(context.instance, k, x(k - 1), u.values[static_cast<std::size_t>(k)]);
    grad(k - 1) += c.g[static_cast<std::size_t>(k)];
  }
  grad *= orientation_sign(context);
  if (!grad.allFinite()) {
    throw EvaluationError("action gradient is not finite", 0, x.cwiseAbs().maxCoeff(), 0.0);
  }
  return grad;
}

Eigen::MatrixXd action_hessian(const ActionContext& context, const Vector& x,
                               const Parameter& u) {
  const int n = context.instance.grid.interior_count;
  Eigen::MatrixXd hess = context.op.matrix;
  for (int k = 1; k <= n; ++k) {
    hess(k - 1, k - 1) -=
        context.nonlinearity_sign *
        evaluate_f_dy(context.instance, k, x(k - 1), u.values[static_cast<std::size_t>(k)]);
  }
  return orientation_sign(context) * hess;
}

Vector equation_residual(const ProblemInstance& instance, const Vector& x,
                         const Parameter& u) {
  const int n = instance.grid.interior_count;
  const auto& c = instance.coefficients;
  const Vector extended = boundary_extend(instance, x);
  const bool periodic = is_periodic(instance);
  const double f_sign = periodic ? 1.0 : -1.0;
  Vector res(n);
  for (int k = 1; k <= n; ++k) {
    // For the periodic problem the flux at k = T wraps through p(0); the
    // corner entries of the matrix encode exactly this substitution.
    const double p_right =
        (periodic && k == n) ? c.p[0] : c.p[static_cast<std::size_t>(k)];
    const double flux_right = p_right * (extended(k + 1) - extended(k));
    const double flux_left =
        c.p[static_cast<std::size_t>(k - 1)] * (extended(k) - extended(k - 1));
    res(k - 1) = flux_right - flux_left + c.q[static_cast<std::size_t>(k)] * extended(k) +
                 f_sign * evaluate_f(instance, k, extended(k),
                                     u.values[static_cast<std::size_t>(k)]) -
                 c.g[static_cast<std::size_t>(k)];
  }
  return res;
}

namespace {

GrowthVerdict classify_power(const ProblemInstance& instance, const PowerModulated& pm,
                             double parameter_bound) {
  GrowthVerdict verdict;
  verdict.r = pm.exponent;
  verdict.B = 1.0;
  verdict.epsilon2 = pm.offset;
  verdict.definiteness = spectral_report(build_operator(instance)).definiteness;

  const int n = instance.grid.interior_count;
  double base_abs_max = 0.0;
  double base_min = std::numeric_limits<double>::infinity();
  double base_max = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k) {
    const double b = pm.base[static_cast<std::size_t>(k)];
    base_abs_max = std::max(base_abs_max, std::abs(b));
    base_min = std::min(base_min, b);
    base_max = std::max(base_max, b);
  }
  const double coef_lo = pm.c0 - std::abs(pm.c1) * parameter_bound;
  const double coef_hi = pm.c0 + std::abs(pm.c1) * parameter_bound;
  const double coef_abs_max = std::max(std::abs(coef_lo), std::abs(coef_hi));

  if (pm.exponent > 1.0 && pm.exponent < 2.0) {
    // |f - offset| <= eps1 |y|^{r-1} holds for all y, two-sided, with
    // equality at the extremal modulation: zero slack.
    verdict.verdict = VerdictClass::Sublinear;
    verdict.epsilon1 = coef_abs_max * base_abs_max;
    verdict.margin = 0.0;
    return verdict;
  }
  if (pm.exponent > 2.0) {
    // Lower bound on the positive branch needs the modulation to stay
    // positive over the whole parameter ball.
    const double eps1 = std::min({coef_lo * base_min, coef_lo * base_max,
                                  coef_hi * base_min, coef_hi * base_max});
    verdict.epsilon1 = eps1;
    if (eps1 > 0.0) {
      verdict.verdict = VerdictClass::Superlinear;
      verdict.margin = eps1;
    }
    return verdict;
  }
  // r = 2: linear bound, classified against the operator definiteness.
  verdict.epsilon1 = coef_abs_max * base_abs_max;
  const SpectralReport spectral = spectral_report(build_operator(instance));
  if (spectral.definiteness == Definiteness::PositiveDefinite ||
      spectral.definiteness == Definiteness::NegativeDefinite) {
    const double constant = spectral.definiteness_constant();
    verdict.window_upper = 2.0 * constant;
    verdict.window_upper_corrected = constant;
    verdict.margin = 2.0 * constant - verdict.epsilon1;
    verdict.margin_corrected = constant - verdict.epsilon1;
    if (verdict.epsilon1 < 2.0 * constant) {
      verdict.verdict = spectral.definiteness == Definiteness::PositiveDefinite
                            ? VerdictClass::LinearPositiveWindow
                            : VerdictClass::LinearNegativeWindow;
    }
  }
  return verdict;
}

GrowthVerdict probe_custom(const ProblemInstance& instance, const CustomNonlinearity& custom,
                           double parameter_bound, const GrowthProbeSpec& spec) {
  GrowthVerdict verdict;
  const DeclaredGrowth& declared = custom.declared;
  verdict.r = declared.r;
  verdict.epsilon1 = declared.epsilon1;
  verdict.epsilon2 = declared.epsilon2;
  verdict.B = declared.B;
  if (declared.growth_class == GrowthClass::Unknown) {
    return verdict;
  }
  if (!(declared.B > 0.0) || !(spec.y_max_factor > 1.0) || spec.u_sample_count < 1) {
    throw PreconditionError("growth probe needs B > 0, y_max_factor > 1, and u samples");
  }
  verdict.definiteness = spectral_report(build_operator(instance)).definiteness;

  const int n = instance.grid.interior_count;
  std::vector<double> magnitudes;
  for (double y = declared.B; y < declared.B * spec.y_max_factor; y *= 2.0) {
    magnitudes.push_back(y);
  }
  magnitudes.push_back(declared.B * spec.y_max_factor);

  double margin = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k) {
    for (int iu = 0; iu < spec.u_sample_count; ++iu) {
      const double u = spec.u_sample_count == 1
                           ? 0.0
                           : -parameter_bound + 2.0 * parameter_bound * iu /
                                                    (spec.u_sample_count - 1);
      for (double mag : magnitudes) {
        for (double y : {mag, -mag}) {
          const double f = custom.f(k, y, u);
          const double bound =
              declared.epsilon1 * std::pow(std::abs(y), declared.r - 1.0) +
              declared.epsilon2;
          const double slack = declared.growth_class == GrowthClass::SuperlinearLower
                                   ? f - bound
                                   : bound - f;
          margin = std::min(margin, slack);
          if (slack < -1e-12 * (1.0 + std::abs(bound))) {
            return verdict;  // declared inequality fails: Unverified
          }
        }
      }
    }
  }
  verdict.margin = margin;
  switch (declared.growth_class) {
    case GrowthClass::SublinearUpper:
      verdict.verdict = VerdictClass::Sublinear;
      break;
    case GrowthClass::SuperlinearLower:
      verdict.verdict = VerdictClass::Superlinear;
      break;
    case GrowthClass::LinearUpper: {
      const SpectralReport spectral = spectral_report(build_operator(instance));
      if (spectral.definiteness == Definiteness::PositiveDefinite ||
          spectral.definiteness == Definiteness::NegativeDefinite) {
        const double constant = spectral.definiteness_constant();
        verdict.window_upper = 2.0 * constant;
        verdict.window_upper_corrected = constant;
        verdict.margin = 2.0 * constant - declared.epsilon1;
        verdict.margin_corrected = constant - declared.epsilon1;
        if (declared.epsilon1 < 2.0 * constant) {
          verdict.verdict = spectral.definiteness == Definiteness::PositiveDefinite
                                ? VerdictClass::LinearPositiveWindow
                                : VerdictClass::LinearNegativeWindow;
        }
      }
      break;
    }
    case GrowthClass::Unknown:
      break;
  }
  return verdict;
}

}  // namespace

GrowthVerdict growth_verdict(const ProblemInstance& instance, double parameter_bound,
                             const GrowthProbeSpec& spec) {
  if (const auto* pm = std::get_if<PowerModulated>(&instance.nonlinearity)) {
    return classify_power(instance, *pm, parameter_bound);
  }
  return probe_custom(instance, std::get<CustomNonlinearity>(instance.nonlinearity),
                      parameter_bound, spec);
}

CoercivityEvidence coercivity_probe(const ActionContext& context, const Parameter& u,
                                    std::span<const double> radii,
                                    int directions_per_sphere) {
  if (radii.size() < 3) {
    throw PreconditionError("coercivity probe needs at least 3 radii");
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw PreconditionError("coercivity probe radii must be positive and increasing");
    }
  }
  const int n = context.instance.grid.interior_count;
  const auto directions = unit_directions(n, directions_per_sphere, kCoercivityProbeSeed);

  CoercivityEvidence evidence;
  evidence.value_at_origin = action_value(context, Vector::Zero(n), u);
  for (double radius : radii) {
    CoercivityEvidence::Row row{radius, std::numeric_limits<double>::infinity(),
                                -std::numeric_limits<double>::infinity()};
    for (const Vector& d : directions) {
      const double value = action_value(context, radius * d, u);
      row.sphere_min = std::min(row.sphere_min, value);
      row.sphere_max = std::max(row.sphere_max, value);
    }
    evidence.table.push_back(row);
  }

  const std::size_t count = evidence.table.size();
  const std::size_t top_begin = count - count / 2;
  bool coercive = true;
  bool anticoercive = true;
  for (std::size_t i = top_begin; i < count; ++i) {
    if (!(evidence.table[i].sphere_min > evidence.value_at_origin + 1.0)) coercive = false;
    if (!(evidence.table[i].sphere_max < evidence.value_at_origin - 1.0)) anticoercive = false;
    if (i > top_begin) {
      if (!(evidence.table[i].sphere_min > evidence.table[i - 1].sphere_min)) coercive = false;
      if (!(evidence.table[i].sphere_max < evidence.table[i - 1].sphere_max)) anticoercive = false;
    }
  }
  if (coercive) {
    evidence.direction = CoercivityDirection::Coercive;
  } else if (anticoercive) {
    evidence.direction = CoercivityDirection::AntiCoercive;
  } else {
    evidence.direction = CoercivityDirection::Inconclusive;
  }
  return evidence;
}

CoercivityEvidence coercivity_probe(const ActionContext& context, const Parameter& u) {
  return coercivity_probe(context, u, kDefaultProbeRadii);
}

double gateaux_bound_probe(const ActionContext& context, double box_halfwidth,
                           std::span<const Parameter> u_samples) {
  if (!(box_halfwidth > 0.0)) {
    throw PreconditionError("gateaux bound probe requires d > 0");
  }
  if (u_samples.empty()) {
    throw PreconditionError("gateaux bound probe requires parameter samples");
  }
  const int n = context.instance.grid.interior_count;
  const double radius = box_halfwidth * std::sqrt(static_cast<double>(n));

  // Absolute power-of-two ladder: scales(d) is a subset of scales(d') for
  // d <= d', which makes the probe monotone in d.
  std::vector<double> scales{0.0};
  const int top = static_cast<int>(std::floor(std::log2(radius)));
  for (int m = top; m > top - 12; --m) {
    scales.push_back(std::ldexp(1.0, m));
  }

  const auto directions = unit_directions(n, 32, kGateauxProbeSeed);
  double bound = 0.0;
  for (const Parameter& u : u_samples) {
    for (double scale : scales) {
      for (const Vector& d : directions) {
        const double norm = action_gradient(context, scale * d, u).norm();
        bound = std::max(bound, norm);
        if (scale == 0.0) break;  // one origin evaluation per parameter
      }
    }
  }
  if (!std::isfinite(bound)) {
    throw EvaluationError("gateaux bound probe is not finite", 0, radius, 0.0);
  }
  return bound;
}

double holder_power_sum_constant(int interior_count, double r) {
  return std::pow(static_cast<double>(interior_count), std::max(0.0, 1.0 - r / 2.0));
}

}  // namespace emden

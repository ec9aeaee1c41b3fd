#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "emden/model.hpp"
#include "emden/operators.hpp"

namespace emden {

enum class Orientation { Minimize, MaximizeNegated };

/// Everything needed to evaluate the action functional
///
///   J(x,u) = 1/2 <A x, x> + <shift, x> - s * sum_k F(k, x(k), u(k))
///            + sum_k g(k) x(k),
///
/// negated as a whole under MaximizeNegated. The nonlinearity sign s is +1
/// for the periodic problem and -1 for the mixed one, whose equation carries
/// f on the right-hand side; with this choice the identity
/// gradient = -residual holds for both boundary types.
struct ActionContext {
  ProblemInstance instance;
  QuadraticOperator op;
  Orientation orientation = Orientation::Minimize;
  double nonlinearity_sign = 1.0;
};

/// Builds the operator for the instance and fixes the nonlinearity sign from
/// the boundary type. Starts out oriented to Minimize.
ActionContext make_action_context(const ProblemInstance& instance);

ActionContext with_orientation(ActionContext context, Orientation orientation);

double action_value(const ActionContext& context, const Vector& x, const Parameter& u);

Vector action_gradient(const ActionContext& context, const Vector& x, const Parameter& u);

/// Oriented Hessian A - s*diag(df/dy), for Newton steps. Entries may be
/// non-finite where df/dy blows up (power exponents below 2 at x(k) = 0);
/// callers must check.
Eigen::MatrixXd action_hessian(const ActionContext& context, const Vector& x,
                               const Parameter& u);

/// Defect of the difference equation at the extended vector: component k is
///   Delta(p(k-1) Delta x~(k-1)) + q(k) x~(k) + f(k, x~(k), u(k)) - g(k)
/// for the periodic problem (where the flux at k = T wraps through p(0)),
/// and the same expression with -f instead of +f for the mixed problem.
Vector equation_residual(const ProblemInstance& instance, const Vector& x,
                         const Parameter& u);

enum class VerdictClass {
  Sublinear,            // upper power bound with exponent in (1,2)
  Superlinear,          // lower power bound with exponent above 2
  LinearPositiveWindow, // linear upper bound, positive definite window
  LinearNegativeWindow, // linear upper bound, negative definite window
  Unverified,
};

struct GrowthVerdict {
  VerdictClass verdict = VerdictClass::Unverified;
  double r = 0.0;
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  double B = 1.0;
  double margin = 0.0;  // slack of the certified inequality or window
  // Linear (r = 2) classes report the eps1 window relative to the operator
  // constant two ways: the doubled bound 2a (resp. 2b) and the corrected one
  // that accounts for the 1/2 in front of the quadratic form.
  std::optional<double> window_upper;
  std::optional<double> window_upper_corrected;
  std::optional<double> margin_corrected;
  Definiteness definiteness = Definiteness::Singular;
};

struct GrowthProbeSpec {
  double y_max_factor = 1e3;  // probe |y| up to factor * B
  int u_sample_count = 9;
};

/// Classifies the growth of f over the parameter ball of radius
/// parameter_bound. Exact closed-form classification for the power family;
/// sampled verification of the declared class for Custom (Unverified when
/// any sample fails).
GrowthVerdict growth_verdict(const ProblemInstance& instance, double parameter_bound,
                             const GrowthProbeSpec& spec = {});

enum class CoercivityDirection { Coercive, AntiCoercive, Inconclusive };

struct CoercivityEvidence {
  CoercivityDirection direction = CoercivityDirection::Inconclusive;
  struct Row {
    double radius;
    double sphere_min;
    double sphere_max;
  };
  std::vector<Row> table;
  double value_at_origin = 0.0;
};

inline constexpr std::array<double, 6> kDefaultProbeRadii{2.5, 5.0, 10.0, 20.0, 40.0, 80.0};

/// Samples the oriented action on spheres of the given radii (64 seeded
/// directions per sphere). Coercive when the sphere minima are strictly
/// increasing over the top half of the radii and sit above J(0,u)+1 there;
/// AntiCoercive symmetrically for the maxima; Inconclusive otherwise.
CoercivityEvidence coercivity_probe(const ActionContext& context, const Parameter& u,
                                    std::span<const double> radii,
                                    int directions_per_sphere = 64);

CoercivityEvidence coercivity_probe(const ActionContext& context, const Parameter& u);

/// Largest gradient norm over a deterministic sample of the ball
/// |x| <= d*sqrt(T) (unit directions scaled by powers of two, plus the
/// origin) and the given parameters. The sampled point sets are nested in d,
/// so the probe is monotone in d.
double gateaux_bound_probe(const ActionContext& context, double box_halfwidth,
                           std::span<const Parameter> u_samples);

/// Constant c with sum |y(k)|^r <= c * |y|^r on R^T: T^{max(0, 1 - r/2)}.
double holder_power_sum_constant(int interior_count, double r);

}  // namespace emden

#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "emden/errors.hpp"

// Problem data for the discrete Emden-Fowler boundary value problem
//
//   Delta(p(k-1) Delta x(k-1)) + q(k) x(k) + f(k, x(k), u(k)) = g(k),
//   k in [1, T],
//
// with either periodic boundary conditions
//
//   x(0) = x(T),  p(0) Delta x(0) = p(T) Delta x(T)
//
// or mixed ones
//
//   x(0) + alpha1 x(1) = a1,  x(T+1) + beta1 x(T) = b1,
//
// where the mixed variant moves f to the right-hand side of the equation.
//
// Index conventions. Coefficient sequences are stored as dense arrays whose
// position k is the grid index k: p has positions 0..T+1, while q, g, u and
// the power-family base have positions 1..T with slot 0 present but unused.
// Unknowns x live in R^T as Eigen vectors, entry i <-> grid index i+1.
// Extended sequences (boundary_extend) are stored position k = index k,
// size T+2.

namespace emden {

using Vector = Eigen::VectorXd;

struct Grid {
  int interior_count = 0;  // number of interior indices; must be >= 3
};

struct PeriodicBoundary {};

// x(0) + alpha1*x(1) = a1,  x(T+1) + beta1*x(T) = b1
struct MixedBoundary {
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double a1 = 0.0;
  double b1 = 0.0;
};

using BoundarySpec = std::variant<PeriodicBoundary, MixedBoundary>;

struct Coefficients {
  std::vector<double> p;  // positions 0..T+1
  std::vector<double> q;  // positions 1..T; q[0] unused
  std::vector<double> g;  // positions 1..T; g[0] unused
};

/// Builds Coefficients from naturally-sized arrays: p_full has T+2 entries
/// p(0..T+1); q_interior, g_interior have T entries each.
Coefficients make_coefficients(const std::vector<double>& p_full,
                               const std::vector<double>& q_interior,
                               const std::vector<double>& g_interior);

/// A parameter u on indices 1..T constrained to the sup-norm ball of
/// radius `bound`.
struct Parameter {
  std::vector<double> values;  // positions 1..T; values[0] unused
  double bound = 0.0;          // M > 0
};

/// Builds a Parameter from a length-T array. Throws PreconditionError when
/// some |u(k)| exceeds the bound or the bound is not positive.
Parameter make_parameter(const std::vector<double>& u_interior, double bound);

double parameter_sup_norm(const Parameter& u);

/// Growth classes the functional layer can certify; a nonlinearity may also
/// declare one for itself (Custom only).
enum class GrowthClass {
  SublinearUpper,    // f <= eps1 |y|^{r-1} + eps2, r in (1,2)
  SuperlinearLower,  // f >= eps1 |y|^{r-1} + eps2, r > 2
  LinearUpper,       // f <= eps1 |y| + eps2, r = 2
  Unknown,
};

struct DeclaredGrowth {
  GrowthClass growth_class = GrowthClass::Unknown;
  double r = 0.0;
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  double B = 1.0;  // threshold beyond which the bound is declared
};

// f(k,y,u) = (c0 + c1*u) * base(k) * sign(y)|y|^{exponent-1} + offset,
// with closed-form antiderivative
// F(k,y,u) = (c0 + c1*u) * base(k) * |y|^{exponent} / exponent + offset*y.
struct PowerModulated {
  double exponent = 2.0;     // r > 1
  std::vector<double> base;  // positions 1..T; base[0] unused
  double c0 = 0.0;
  double c1 = 0.0;
  double offset = 0.0;
};

PowerModulated make_power_modulated(double exponent,
                                    const std::vector<double>& base_interior,
                                    double c0, double c1, double offset);

/// Uniform base shortcut: base(k) = value for all k.
PowerModulated make_power_modulated(double exponent, int interior_count,
                                    double base_value, double c0, double c1,
                                    double offset);

struct CustomNonlinearity {
  std::function<double(int, double, double)> f;               // f(k,y,u)
  std::function<double(int, double, double)> antiderivative;  // optional
  std::function<double(int, double, double)> df_dy;           // optional
  DeclaredGrowth declared;
};

using Nonlinearity = std::variant<PowerModulated, CustomNonlinearity>;

struct ProblemInstance {
  Grid grid;
  BoundarySpec boundary;
  Coefficients coefficients;
  Nonlinearity nonlinearity;
};

struct Violation {
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of the instance. Violations are data,
/// not faults: the report lists them all and is empty on success.
ValidationReport validate_problem(const ProblemInstance& instance);

/// Checks the parameter against the grid and its own ball constraint.
std::vector<Violation> validate_parameter(const Parameter& u, const Grid& grid);

/// Evaluates f(k, y, u). Throws EvaluationError when the result is not
/// finite; k must be in [1, T].
double evaluate_f(const ProblemInstance& instance, int k, double y, double u);

/// Evaluates the antiderivative F(k, y, u) = integral of f(k, ., u) over
/// [0, y]. Closed form for the power family; adaptive quadrature with
/// absolute tolerance 1e-10 for Custom without a supplied antiderivative.
double evaluate_F(const ProblemInstance& instance, int k, double y, double u);

/// d/dy f(k, y, u). Analytic for the power family (may be infinite at y = 0
/// when the exponent is below 2); central finite difference for Custom
/// without a supplied derivative. Callers must guard for non-finite values.
double evaluate_f_dy(const ProblemInstance& instance, int k, double y, double u);

/// Extends an interior vector x in R^T to positions 0..T+1 realizing the
/// boundary conditions: the periodic wrap x(0) = x(T), x(T+1) = x(1), or the
/// mixed substitutions x(0) = a1 - alpha1*x(1), x(T+1) = b1 - beta1*x(T).
Vector boundary_extend(const ProblemInstance& instance, const Vector& x);

inline bool is_periodic(const ProblemInstance& instance) {
  return std::holds_alternative<PeriodicBoundary>(instance.boundary);
}

}  // namespace emden

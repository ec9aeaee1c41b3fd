#pragma once

#include <Eigen/Core>

#include "emden/model.hpp"

namespace emden {

/// Quadratic-form data of the action functional: the symmetric T x T matrix
/// and the affine shift vector (zero for the periodic problem).
struct QuadraticOperator {
  Eigen::MatrixXd matrix;
  Vector shift;
};

enum class Definiteness { PositiveDefinite, NegativeDefinite, Indefinite, Singular };

struct SpectralReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Definiteness definiteness = Definiteness::Singular;
  double operator_norm = 0.0;  // max(|lambda_min|, |lambda_max|)
  double tol = 0.0;

  /// a with <Ay,y> >= a|y|^2 for positive definite matrices (= lambda_min),
  /// b with <Ay,y> <= -b|y|^2 for negative definite ones (= -lambda_max),
  /// 0 otherwise.
  double definiteness_constant() const {
    if (definiteness == Definiteness::PositiveDefinite) return lambda_min;
    if (definiteness == Definiteness::NegativeDefinite) return -lambda_max;
    return 0.0;
  }
};

/// Assembles the periodic quadratic form: diagonal p(k-1)+p(k)-q(k) with the
/// last diagonal entry p(T-1)+p(0)-q(T), off-diagonals -p(k), and corner
/// entries -p(0) realizing the periodic wrap. The shift is zero.
QuadraticOperator build_periodic_operator(const Coefficients& coefficients,
                                          const Grid& grid);

/// Assembles the mixed-boundary quadratic form from the equation residual:
/// the symmetric tridiagonal matrix with diagonal p(k-1)+p(k)-q(k) plus
/// boundary corrections alpha1*p(0) at (1,1) and beta1*p(T) at (T,T),
/// off-diagonals -p(k), and shift (-p(0)*a1, 0, ..., 0, -p(T)*b1). The
/// assembly is cross-checked column by column against the affine residual
/// map; a mismatch raises ConstructionError.
QuadraticOperator build_mixed_operator(const Coefficients& coefficients,
                                       const MixedBoundary& boundary,
                                       const Grid& grid);

/// Dispatches on the boundary variant of the instance.
QuadraticOperator build_operator(const ProblemInstance& instance);

/// Symmetric eigen-decomposition of the matrix with classification at the
/// dead-zone threshold tol_def: eigenvalues within [-tol_def, tol_def] make
/// the matrix Singular rather than silently definite.
SpectralReport spectral_report(const QuadraticOperator& op, double tol_def = 1e-9);

}  // namespace emden

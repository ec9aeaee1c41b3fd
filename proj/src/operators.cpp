#include "emden/operators.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace emden {
namespace {

// Affine residual map of the mixed linear problem (f = 0, g = 0):
// row k of Delta(p(k-1) Delta x(k-1)) + q(k) x(k) with the boundary
// substitutions x(0) = a1 - alpha1 x(1), x(T+1) = b1 - beta1 x(T) inlined.
Vector mixed_linear_residual(const Coefficients& c, const MixedBoundary& bd,
                             int n, const Vector& x) {
  Vector extended(n + 2);
  extended.segment(1, n) = x;
  extended(0) = bd.a1 - bd.alpha1 * x(0);
  extended(n + 1) = bd.b1 - bd.beta1 * x(n - 1);
  Vector res(n);
  for (int k = 1; k <= n; ++k) {
    const double flux_right = c.p[static_cast<std::size_t>(k)] * (extended(k + 1) - extended(k));
    const double flux_left =
        c.p[static_cast<std::size_t>(k - 1)] * (extended(k) - extended(k - 1));
    res(k - 1) = flux_right - flux_left + c.q[static_cast<std::size_t>(k)] * extended(k);
  }
  return res;
}

}  // namespace

QuadraticOperator build_periodic_operator(const Coefficients& c, const Grid& grid) {
  const int n = grid.interior_count;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    const double p_left = c.p[static_cast<std::size_t>(k - 1)];
    const double p_right = k == n ? c.p[0] : c.p[static_cast<std::size_t>(k)];
    m(k - 1, k - 1) = p_left + p_right - c.q[static_cast<std::size_t>(k)];
    if (k < n) {
      m(k - 1, k) = -c.p[static_cast<std::size_t>(k)];
      m(k, k - 1) = -c.p[static_cast<std::size_t>(k)];
    }
  }
  m(0, n - 1) += -c.p[0];
  m(n - 1, 0) += -c.p[0];
  return {std::move(m), Vector::Zero(n)};
}

QuadraticOperator build_mixed_operator(const Coefficients& c, const MixedBoundary& bd,
                                       const Grid& grid) {
  const int n = grid.interior_count;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m(k - 1, k - 1) = c.p[static_cast<std::size_t>(k - 1)] +
                      c.p[static_cast<std::size_t>(k)] -
                      c.q[static_cast<std::size_t>(k)];
    if (k < n) {
      m(k - 1, k) = -c.p[static_cast<std::size_t>(k)];
      m(k, k - 1) = -c.p[static_cast<std::size_t>(k)];
    }
  }
  m(0, 0) += bd.alpha1 * c.p[0];
  m(n - 1, n - 1) += bd.beta1 * c.p[static_cast<std::size_t>(n)];

  Vector shift = Vector::Zero(n);
  shift(0) -= c.p[0] * bd.a1;
  shift(n - 1) -= c.p[static_cast<std::size_t>(n)] * bd.b1;

  // The matrix is the negated linear part of the residual and the shift its
  // negated constant part; verify both exactly, column by column.
  const Vector at_zero = mixed_linear_residual(c, bd, n, Vector::Zero(n));
  const double scale = 1.0 + m.cwiseAbs().maxCoeff() + at_zero.cwiseAbs().maxCoeff();
  if (((-at_zero) - shift).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConstructionError("mixed operator shift disagrees with the residual map");
  }
  for (int j = 0; j < n; ++j) {
    const Vector column = mixed_linear_residual(c, bd, n, Vector::Unit(n, j)) - at_zero;
    if ((m.col(j) + column).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ConstructionError("mixed operator column " + std::to_string(j + 1) +
                              " disagrees with the residual map");
    }
  }
  return {std::move(m), std::move(shift)};
}

QuadraticOperator build_operator(const ProblemInstance& instance) {
  if (const auto* mixed = std::get_if<MixedBoundary>(&instance.boundary)) {
    return build_mixed_operator(instance.coefficients, *mixed, instance.grid);
  }
  return build_periodic_operator(instance.coefficients, instance.grid);
}

SpectralReport spectral_report(const QuadraticOperator& op, double tol_def) {
  const Eigen::MatrixXd& m = op.matrix;
  if (m.rows() != m.cols()) {
    throw PreconditionError("spectral report requires a square matrix");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw PreconditionError("spectral report requires a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigen-decomposition failed");
  }
  SpectralReport report;
  report.lambda_min = solver.eigenvalues().minCoeff();
  report.lambda_max = solver.eigenvalues().maxCoeff();
  report.operator_norm = std::max(std::abs(report.lambda_min), std::abs(report.lambda_max));
  report.tol = tol_def;
  if (report.lambda_min > tol_def) {
    report.definiteness = Definiteness::PositiveDefinite;
  } else if (report.lambda_max < -tol_def) {
    report.definiteness = Definiteness::NegativeDefinite;
  } else if (std::abs(report.lambda_min) <= tol_def || std::abs(report.lambda_max) <= tol_def) {
    report.definiteness = Definiteness::Singular;
  } else {
    report.definiteness = Definiteness::Indefinite;
  }
  return report;
}

}  // namespace emden

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace emden {

/// Nonlinearity or functional evaluation produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, int k, double y, double u)
      : std::runtime_error(what), k_(k), y_(y), u_(u) {}

  int index() const { return k_; }
  double argument() const { return y_; }
  double parameter() const { return u_; }

 private:
  int k_;
  double y_;
  double u_;
};

/// An assembled operator failed its residual cross-check.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated (size guards, empty input, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No multistart branch reached the gradient tolerance. Carries the best
/// iterate seen so that callers can still inspect partial progress.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, Eigen::VectorXd best_point,
                      double best_value, double gradient_norm)
      : std::runtime_error(what),
        best_point_(std::move(best_point)),
        best_value_(best_value),
        gradient_norm_(gradient_norm) {}

  const Eigen::VectorXd& best_point() const { return best_point_; }
  double best_value() const { return best_value_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  Eigen::VectorXd best_point_;
  double best_value_;
  double gradient_norm_;
};

}  // namespace emden

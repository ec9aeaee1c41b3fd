#include "emden/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace emden {
namespace {

std::vector<double> pad_interior(const std::vector<double>& interior) {
  std::vector<double> padded(interior.size() + 1, 0.0);
  std::copy(interior.begin(), interior.end(), padded.begin() + 1);
  return padded;
}

double sign(double y) { return (y > 0.0) - (y < 0.0); }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

Coefficients make_coefficients(const std::vector<double>& p_full,
                               const std::vector<double>& q_interior,
                               const std::vector<double>& g_interior) {
  return Coefficients{p_full, pad_interior(q_interior), pad_interior(g_interior)};
}

Parameter make_parameter(const std::vector<double>& u_interior, double bound) {
  if (!(bound > 0.0)) {
    throw PreconditionError("parameter bound M must be positive, got " + fmt(bound));
  }
  for (std::size_t i = 0; i < u_interior.size(); ++i) {
    if (!(std::abs(u_interior[i]) <= bound)) {
      throw PreconditionError("parameter leaves the L_M ball: |u(" +
                              std::to_string(i + 1) + ")| = " +
                              fmt(std::abs(u_interior[i])) + " > M = " + fmt(bound));
    }
  }
  return Parameter{pad_interior(u_interior), bound};
}

double parameter_sup_norm(const Parameter& u) {
  double best = 0.0;
  for (std::size_t k = 1; k < u.values.size(); ++k) {
    best = std::max(best, std::abs(u.values[k]));
  }
  return best;
}

PowerModulated make_power_modulated(double exponent,
                                    const std::vector<double>& base_interior,
                                    double c0, double c1, double offset) {
  return PowerModulated{exponent, pad_interior(base_interior), c0, c1, offset};
}

PowerModulated make_power_modulated(double exponent, int interior_count,
                                    double base_value, double c0, double c1,
                                    double offset) {
  std::vector<double> base(static_cast<std::size_t>(interior_count), base_value);
  return make_power_modulated(exponent, base, c0, c1, offset);
}

ValidationReport validate_problem(const ProblemInstance& instance) {
  ValidationReport report;
  auto add = [&report](std::string where, std::string message) {
    report.violations.push_back({std::move(where), std::move(message)});
  };

  const int n = instance.grid.interior_count;
  if (n < 3) {
    add("grid.interior_count", "T >= 3 required, got " + std::to_string(n));
    return report;  // size checks below would be meaningless
  }

  const auto& c = instance.coefficients;
  if (c.p.size() != static_cast<std::size_t>(n + 2)) {
    add("coefficients.p", "expected " + std::to_string(n + 2) + " entries p(0..T+1), got " +
                              std::to_string(c.p.size()));
  } else if (!all_finite(c.p)) {
    add("coefficients.p", "non-finite entry");
  }
  if (c.q.size() != static_cast<std::size_t>(n + 1)) {
    add("coefficients.q", "expected " + std::to_string(n) + " entries q(1..T), got " +
                              std::to_string(c.q.empty() ? 0 : c.q.size() - 1));
  } else if (!all_finite(c.q)) {
    add("coefficients.q", "non-finite entry");
  }
  if (c.g.size() != static_cast<std::size_t>(n + 1)) {
    add("coefficients.g", "expected " + std::to_string(n) + " entries g(1..T), got " +
                              std::to_string(c.g.empty() ? 0 : c.g.size() - 1));
  } else {
    if (!all_finite(c.g)) {
      add("coefficients.g", "non-finite entry");
    }
    bool some_nonzero = false;
    for (int k = 1; k <= n; ++k) {
      if (c.g[static_cast<std::size_t>(k)] != 0.0) some_nonzero = true;
    }
    if (!some_nonzero) {
      add("coefficients.g", "g vanishes identically; some g(k1) != 0 is required");
    }
  }

  if (const auto* mixed = std::get_if<MixedBoundary>(&instance.boundary)) {
    if (!std::isfinite(mixed->alpha1) || !std::isfinite(mixed->beta1) ||
        !std::isfinite(mixed->a1) || !std::isfinite(mixed->b1)) {
      add("boundary", "non-finite mixed boundary constant");
    }
  }

  if (const auto* pm = std::get_if<PowerModulated>(&instance.nonlinearity)) {
    if (!(pm->exponent > 1.0)) {
      add("nonlinearity.exponent", "exponent r > 1 required, got " + fmt(pm->exponent));
    }
    if (pm->base.size() != static_cast<std::size_t>(n + 1)) {
      add("nonlinearity.base", "expected " + std::to_string(n) + " entries base(1..T), got " +
                                   std::to_string(pm->base.empty() ? 0 : pm->base.size() - 1));
    } else if (!all_finite(pm->base)) {
      add("nonlinearity.base", "non-finite entry");
    }
    if (!std::isfinite(pm->c0) || !std::isfinite(pm->c1) || !std::isfinite(pm->offset)) {
      add("nonlinearity", "non-finite modulation constant");
    }
  } else if (const auto* custom = std::get_if<CustomNonlinearity>(&instance.nonlinearity)) {
    if (!custom->f) {
      add("nonlinearity.f", "custom nonlinearity has no evaluator");
    }
  }

  return report;
}

std::vector<Violation> validate_parameter(const Parameter& u, const Grid& grid) {
  std::vector<Violation> violations;
  const int n = grid.interior_count;
  if (u.values.size() != static_cast<std::size_t>(n + 1)) {
    violations.push_back({"parameter.values",
                          "expected " + std::to_string(n) + " entries u(1..T), got " +
                              std::to_string(u.values.empty() ? 0 : u.values.size() - 1)});
    return violations;
  }
  if (!(u.bound > 0.0)) {
    violations.push_back({"parameter.bound", "M must be positive"});
  }
  for (int k = 1; k <= n; ++k) {
    const double v = u.values[static_cast<std::size_t>(k)];
    if (!std::isfinite(v) || !(std::abs(v) <= u.bound)) {
      violations.push_back({"parameter.values",
                            "|u(" + std::to_string(k) + ")| = " + fmt(std::abs(v)) +
                                " leaves the L_M ball of radius " + fmt(u.bound)});
    }
  }
  return violations;
}

double evaluate_f(const ProblemInstance& instance, int k, double y, double u) {
  const int n = instance.grid.interior_count;
  if (k < 1 || k > n) {
    throw PreconditionError("index k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");
  }
  double value = 0.0;
  if (const auto* pm = std::get_if<PowerModulated>(&instance.nonlinearity)) {
    value = (pm->c0 + pm->c1 * u) * pm->base[static_cast<std::size_t>(k)] *
                sign(y) * std::pow(std::abs(y), pm->exponent - 1.0) +
            pm->offset;
  } else {
    const auto& custom = std::get<CustomNonlinearity>(instance.nonlinearity);
    value = custom.f(k, y, u);
  }
  if (!std::isfinite(value)) {
    throw EvaluationError("f(k,y,u) evaluated to a non-finite value", k, y, u);
  }
  return value;
}

double evaluate_F(const ProblemInstance& instance, int k, double y, double u) {
  const int n = instance.grid.interior_count;
  if (k < 1 || k > n) {
    throw PreconditionError("index k = " + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");
  }
  double value = 0.0;
  if (const auto* pm = std::get_if<PowerModulated>(&instance.nonlinearity)) {
    value = (pm->c0 + pm->c1 * u) * pm->base[static_cast<std::size_t>(k)] *
                std::pow(std::abs(y), pm->exponent) / pm->exponent +
            pm->offset * y;
  } else {
    const auto& custom = std::get<CustomNonlinearity>(instance.nonlinearity);
    if (custom.antiderivative) {
      value = custom.antiderivative(k, y, u);
    } else if (y == 0.0) {
      value = 0.0;
    } else {
      constexpr double kAbsTol = 1e-10;
      double error = 0.0;
      value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          [&](double t) { return custom.f(k, t, u); }, 0.0, y, 12, 1e-12, &error);
      if (!(error <= kAbsTol)) {
        throw EvaluationError("quadrature for F(k,y,u) did not reach 1e-10", k, y, u);
      }
    }
  }
  if (!std::isfinite(value)) {
    throw EvaluationError("F(k,y,u) evaluated to a non-finite value", k, y, u);
  }
  return value;
}

double evaluate_f_dy(const ProblemInstance& instance, int k, double y, double u) {
  if (const auto* pm = std::get_if<PowerModulated>(&instance.nonlinearity)) {
    const double coef =
        (pm->c0 + pm->c1 * u) * pm->base[static_cast<std::size_t>(k)];
    const double r = pm->exponent;
    if (y == 0.0) {
      if (r > 2.0) return 0.0;
      if (r == 2.0) return coef;
      return coef == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return coef * (r - 1.0) * std::pow(std::abs(y), r - 2.0);
  }
  const auto& custom = std::get<CustomNonlinearity>(instance.nonlinearity);
  if (custom.df_dy) {
    return custom.df_dy(k, y, u);
  }
  const double h = 1e-6 * (1.0 + std::abs(y));
  return (custom.f(k, y + h, u) - custom.f(k, y - h, u)) / (2.0 * h);
}

Vector boundary_extend(const ProblemInstance& instance, const Vector& x) {
  const int n = instance.grid.interior_count;
  if (x.size() != n) {
    throw PreconditionError("interior vector has length " + std::to_string(x.size()) +
                            ", expected T = " + std::to_string(n));
  }
  Vector extended(n + 2);
  extended.segment(1, n) = x;
  if (const auto* mixed = std::get_if<MixedBoundary>(&instance.boundary)) {
    extended(0) = mixed->a1 - mixed->alpha1 * x(0);
    extended(n + 1) = mixed->b1 - mixed->beta1 * x(n - 1);
  } else {
    extended(0) = x(n - 1);
    extended(n + 1) = x(0);
  }
  return extended;
}

}  // namespace emden

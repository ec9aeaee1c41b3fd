// Acceptance suite: one pass/fail line per criterion, exit code counts the
// failures. Each criterion pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "emden/cli.hpp"
#include "emden/dependence.hpp"
#include "emden/solver.hpp"
#include "test_helpers.hpp"

using namespace emden;
using emden::testing::constant_parameter;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

SolveConfig config_with_seed(std::uint64_t seed) {
  SolveConfig config;
  config.seed = seed;
  return config;
}

Vector workhorse_solution() {
  Vector x(3);
  x << -0.5, -0.25, -0.25;
  return x;
}

Vector mixed_solution() {
  Vector x(3);
  x << 0.25, -0.5, -0.25;
  return x;
}

// Norm bound for critical points of a coercive sublinear problem: any
// stationary x satisfies |x| <= (sqrt(T)(eps1 |x|^{r-1} + eps2) + |g+shift|)
// / lambda_min, whose smallest fixed point bounds the minimizer and hence
// the oracle box.
double sublinear_solution_bound(const ActionContext& context, const Parameter& u) {
  const auto* pm = std::get_if<PowerModulated>(&context.instance.nonlinearity);
  expect(pm != nullptr && pm->exponent < 2.0, "box bound expects a sublinear power family");
  const int n = context.instance.grid.interior_count;
  double eps1 = 0.0;
  for (int k = 1; k <= n; ++k) {
    eps1 = std::max(eps1, std::abs((pm->c0 + pm->c1 * u.values[static_cast<std::size_t>(k)]) *
                                   pm->base[static_cast<std::size_t>(k)]));
  }
  const double eps2 = std::abs(pm->offset);
  const SpectralReport spectral = spectral_report(context.op);
  expect(spectral.definiteness == Definiteness::PositiveDefinite,
         "box bound expects a positive definite operator");
  Vector g_vec(n);
  for (int k = 1; k <= n; ++k) {
    g_vec(k - 1) = context.instance.coefficients.g[static_cast<std::size_t>(k)];
  }
  const double forcing = (g_vec + context.op.shift).norm();
  const double root_t = std::sqrt(static_cast<double>(n));

  double radius = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    radius = (root_t * (eps1 * std::pow(radius, pm->exponent - 1.0) + eps2) + forcing) /
             spectral.lambda_min;
  }
  return radius * (1.0 + 1e-9);
}

// --- criterion 1 -----------------------------------------------------------

void gradient_consistency() {
  std::mt19937_64 rng(0xACCE5501);
  for (int trial = 0; trial < 200; ++trial) {
    const auto draw = emden::testing::random_draw(rng);
    const ActionContext context = make_action_context(draw.instance);
    const Vector analytic = action_gradient(context, draw.x, draw.parameter);
    const Vector numeric = emden::testing::central_fd_gradient(
        [&](const Vector& y) { return action_value(context, y, draw.parameter); }, draw.x);
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    const double error = (analytic - numeric).cwiseAbs().maxCoeff() / scale;
    expect(error <= 1e-6, "draw " + std::to_string(trial) + ": relative gradient error " +
                              fmt(error) + " exceeds 1e-6");
  }
}

// --- criterion 2 -----------------------------------------------------------

void critical_point_equivalence() {
  struct Case {
    ActionContext context;
    Parameter u;
  };
  std::vector<Case> cases;
  cases.push_back({make_action_context(emden::testing::quadratic_fixture()),
                   constant_parameter(3, 0.0, 1.0)});
  cases.push_back({make_action_context(emden::testing::sublinear_fixture()),
                   constant_parameter(3, 1.0, 1.0)});
  cases.push_back({make_action_context(emden::testing::linear_window_fixture()),
                   constant_parameter(3, 0.0, 1.0)});
  cases.push_back({make_action_context(emden::testing::mixed_fixture()),
                   constant_parameter(3, 0.0, 1.0)});
  {
    const ActionContext base =
        make_action_context(emden::testing::superlinear_singular_fixture());
    const Parameter u = constant_parameter(3, 0.0, 1.0);
    cases.push_back({orient_for_minimization(base, u).context, u});
  }

  for (std::size_t i = 0; i < cases.size(); ++i) {
    const SolveReport report =
        minimize_action(cases[i].context, cases[i].u, config_with_seed(7));
    expect(report.residual_norm <= 1e-8,
           "case " + std::to_string(i) + ": residual " + fmt(report.residual_norm));
    Vector perturbed = report.x_star;
    perturbed(0) += 1e-2;
    const double disturbed =
        equation_residual(cases[i].context.instance, perturbed, cases[i].u)
            .lpNorm<Eigen::Infinity>();
    expect(disturbed > 1e-4,
           "case " + std::to_string(i) + ": perturbed residual only " + fmt(disturbed));
  }
}

// --- criterion 3 -----------------------------------------------------------

void oracle_equivalence() {
  const ActionContext quadratic = make_action_context(emden::testing::quadratic_fixture());
  const Parameter zero = constant_parameter(3, 0.0, 1.0);
  const SolveReport closed = minimize_action(quadratic, zero, config_with_seed(11));
  expect((closed.x_star - workhorse_solution()).cwiseAbs().maxCoeff() <= 1e-9,
         "quadratic solve off the closed form");
  expect(std::abs(closed.J_star - (-0.25)) <= 1e-9,
         "quadratic value " + fmt(closed.J_star) + " != -0.25");

  const ActionContext sublinear = make_action_context(emden::testing::sublinear_fixture());
  const Parameter u = constant_parameter(3, 0.25, 1.0);
  const SolveReport solve = minimize_action(sublinear, u, config_with_seed(11));
  const double box = sublinear_solution_bound(sublinear, u);
  expect(solve.x_star.norm() <= box, "minimizer escapes the coercivity box");
  const auto [x_grid, value_grid] = brute_force_oracle(sublinear, u, box, 161);
  expect(std::abs(solve.J_star - value_grid) <= 1e-3,
         "solver vs grid gap " + fmt(std::abs(solve.J_star - value_grid)) +
             " exceeds 1e-3 (box " + fmt(box) + ")");
}

// --- criterion 4 -----------------------------------------------------------

void superlinear_regime() {
  const ActionContext base =
      make_action_context(emden::testing::superlinear_singular_fixture());
  const Parameter u = constant_parameter(3, 0.0, 1.0);
  const auto [oriented, evidence] = orient_for_minimization(base, u);
  expect(evidence.direction == CoercivityDirection::AntiCoercive,
         "probe did not report anti-coercive");
  expect(oriented.orientation == Orientation::MaximizeNegated, "orientation not flipped");
  const SolveReport report = minimize_action(oriented, u, config_with_seed(13));
  expect(report.residual_norm <= 1e-8, "residual " + fmt(report.residual_norm));
  const SpectralReport spectral = spectral_report(base.op);
  expect(spectral.definiteness == Definiteness::Singular,
         "fixture operator should be singular");
}

// --- criterion 5 -----------------------------------------------------------

void linear_window() {
  const ProblemInstance instance = emden::testing::linear_window_fixture();
  const ActionContext context = make_action_context(instance);
  const Parameter u = constant_parameter(3, 0.0, 1.0);
  const auto [oriented, evidence] = orient_for_minimization(context, u);
  expect(evidence.direction == CoercivityDirection::Coercive, "probe not coercive");
  const SolveReport report = minimize_action(oriented, u, config_with_seed(17));
  expect(report.grad_norm <= 1e-10, "solve did not converge");

  const GrowthVerdict verdict = growth_verdict(instance, 1.0);
  expect(verdict.verdict == VerdictClass::LinearPositiveWindow, "verdict class wrong");
  expect(verdict.window_upper.has_value() && std::abs(*verdict.window_upper - 2.0) <= 1e-9,
         "window upper bound should be 2a = 2");
  expect(verdict.window_upper_corrected.has_value() &&
             std::abs(*verdict.window_upper_corrected - 1.0) <= 1e-9,
         "corrected window should be a = 1");
  expect(std::abs(verdict.margin - 1.8) <= 1e-9, "window margin should be 1.8");
  expect(verdict.margin_corrected.has_value() &&
             std::abs(*verdict.margin_corrected - 0.8) <= 1e-9,
         "corrected margin should be 0.8");
}

// --- criterion 6 -----------------------------------------------------------

void run_reference_study(const ProblemInstance& instance, const Vector& x_limit,
                         std::uint64_t seed) {
  const ActionContext context = make_action_context(instance);
  const ParameterSequence sequence(
      AffineHomotopy{{0.0, 0.0, 0.0}, {0.05, 0.05, 0.05}, 1.0});
  const StudyReport report = run_study(context, sequence, 64, config_with_seed(seed));

  expect(report.all_converged, "some per-n solve failed");
  expect(report.alpha_max_abs <= 1e-12,
         "J(0, u_n) not identically zero: " + fmt(report.alpha_max_abs));
  expect(std::isfinite(report.uniform_bound_c) && report.uniform_bound_c > 0.0,
         "uniform bound not reported");
  expect((report.x_bar - x_limit).cwiseAbs().maxCoeff() <= 1e-9,
         "limit candidate away from the closed form");
  expect(report.tail_distances_nonincreasing, "tail distances increase");
  const auto& rate = report.certification.convergence_rate_table;
  expect(!rate.empty(), "empty rate table");
  expect(rate.back().n == 64, "subsequence does not reach n = N");
  expect(rate.back().x_dist <= 1e-3,
         "final distance " + fmt(rate.back().x_dist) + " exceeds 1e-3");
  expect(report.certification.limit_is_critical, "limit not critical");
  expect(report.certification.limit_is_minimizer_candidate,
         "limit not a minimizer candidate");
  expect(!report.certification.inconclusive, "certification inconclusive");
}

void dependence_study() {
  run_reference_study(emden::testing::sublinear_fixture(), workhorse_solution(), 19);
}

// --- criterion 7 -----------------------------------------------------------

void mixed_problem() {
  const ProblemInstance instance = emden::testing::mixed_fixture();
  const ActionContext context = make_action_context(instance);
  const Parameter u = constant_parameter(3, 0.0, 1.0);

  // Finite-difference check of the assembled quadratic part.
  std::mt19937_64 rng(0x7E57);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = normal(rng);
    const Vector analytic = context.op.matrix * x + context.op.shift;
    const Vector numeric = emden::testing::central_fd_gradient(
        [&](const Vector& y) {
          return 0.5 * y.dot(context.op.matrix * y) + context.op.shift.dot(y);
        },
        x);
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    expect((analytic - numeric).cwiseAbs().maxCoeff() / scale <= 1e-6,
           "operator gradient check failed");
  }

  const SolveReport report = minimize_action(context, u, config_with_seed(23));
  expect((report.x_star - mixed_solution()).cwiseAbs().maxCoeff() <= 1e-9,
         "mixed solve away from the closed form");
  const auto& boundary = std::get<MixedBoundary>(instance.boundary);
  const Vector extended = boundary_extend(instance, report.x_star);
  expect(std::abs(extended(0) + boundary.alpha1 * report.x_star(0) - boundary.a1) <= 1e-10,
         "left boundary condition violated");
  expect(std::abs(extended(4) + boundary.beta1 * report.x_star(2) - boundary.b1) <= 1e-10,
         "right boundary condition violated");
  expect(report.residual_norm <= 1e-10, "mixed residual " + fmt(report.residual_norm));

  run_reference_study(emden::testing::mixed_sublinear_fixture(), mixed_solution(), 29);
}

// --- criterion 8 -----------------------------------------------------------

void nontriviality() {
  struct Case {
    ProblemInstance instance;
    Parameter u;
  };
  std::vector<Case> cases;
  cases.push_back({emden::testing::quadratic_fixture(), constant_parameter(3, 0.0, 1.0)});
  cases.push_back({emden::testing::sublinear_fixture(), constant_parameter(3, 1.0, 1.0)});
  cases.push_back(
      {emden::testing::superlinear_singular_fixture(), constant_parameter(3, 0.0, 1.0)});
  cases.push_back({emden::testing::linear_window_fixture(), constant_parameter(3, 0.0, 1.0)});
  cases.push_back({emden::testing::mixed_fixture(), constant_parameter(3, 0.0, 1.0)});

  for (std::size_t i = 0; i < cases.size(); ++i) {
    const ActionContext base = make_action_context(cases[i].instance);
    const auto [oriented, evidence] = orient_for_minimization(base, cases[i].u);
    const SolveReport report = minimize_action(oriented, cases[i].u, config_with_seed(31));
    expect(report.x_star.lpNorm<Eigen::Infinity>() > 1e-6,
           "case " + std::to_string(i) + ": trivial solution returned");
    const VuCertificate zero_certificate =
        verify_membership(oriented, cases[i].u, Vector::Zero(3), config_with_seed(31));
    expect(!zero_certificate.is_critical,
           "case " + std::to_string(i) + ": zero wrongly certified as critical");
  }
}

// --- criterion 9 -----------------------------------------------------------

void determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "emden_acceptance_det";
  fs::remove_all(root);

  const std::string config_text = R"({
  "problem": {
    "T": 3,
    "boundary": {"kind": "periodic"},
    "p": 1,
    "q": -1,
    "g": [1, 0, 0],
    "nonlinearity": {"kind": "power", "r": 1.5, "c0": 0.0, "c1": 1.0, "offset": 0.0}
  },
  "sequence": {"kind": "affine", "ubar": 0, "v": 0.05, "N": 64, "M": 1.0},
  "solver": {"seed": 20240229}
})";

  std::vector<std::string> contents;
  for (const char* run : {"a", "b"}) {
    const cli::RunConfig config = cli::parse_config_text(config_text);
    cli::CommandOptions options;
    options.out_dir = root / run;
    options.quiet = true;
    const int code = cli::command_study(config, options);
    expect(code == cli::kExitOk, "study command exited with " + std::to_string(code));
    std::ifstream file(root / run / "study_report.json", std::ios::binary);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    contents.push_back(buffer.str());
  }
  expect(!contents[0].empty(), "empty study report");
  expect(contents[0] == contents[1], "study reports differ between identical runs");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void()> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria = {
      {"1 gradient consistency (200 random instances, rel err <= 1e-6)",
       gradient_consistency, 10.0},
      {"2 critical point <=> solution (residual 1e-8, perturbation > 1e-4)",
       critical_point_equivalence, 5.0},
      {"3 oracle equivalence (closed form 1e-9, grid oracle 1e-3)", oracle_equivalence,
       30.0},
      {"4 superlinear regime on a singular operator (anti-coercive, negated solve)",
       superlinear_regime, 10.0},
      {"5 linear growth window (coercive solve, doubled and corrected margins)",
       linear_window, 10.0},
      {"6 dependence study (homotopy v/n, N=64, limit certified)", dependence_study, 60.0},
      {"7 mixed boundary problem (operator check, boundary conditions, study)",
       mixed_problem, 60.0},
      {"8 nontriviality (nonzero solutions, zero rejected)", nontriviality, 5.0},
      {"9 determinism (byte-identical study reports)", determinism, 120.0},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (error.empty() && seconds > criterion.budget_seconds) {
      error = "runtime " + fmt(seconds) + " s exceeds the " +
              fmt(criterion.budget_seconds) + " s budget";
    }
    if (error.empty()) {
      std::printf("PASS  criterion %s  (%.2f s)\n", criterion.name, seconds);
    } else {
      ++failures;
      std::printf("FAIL  criterion %s  (%.2f s): %s\n", criterion.name, seconds,
                  error.c_str());
    }
  }
  return failures;
}

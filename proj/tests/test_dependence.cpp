#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "emden/dependence.hpp"
#include "test_helpers.hpp"

using namespace emden;
using emden::testing::constant_parameter;

namespace {

Vector workhorse_solution() {
  Vector x(3);
  x << -0.5, -0.25, -0.25;
  return x;
}

SolveConfig test_config(std::uint64_t seed = 42) {
  SolveConfig config;
  config.seed = seed;
  return config;
}

Vector point(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("subsequence extraction") {
  SUBCASE("empty input is a precondition fault") {
    CHECK_THROWS_AS(extract_convergent_subsequence({}), PreconditionError);
  }

  SUBCASE("a Cauchy tail is returned whole") {
    std::vector<Vector> points;
    for (int n = 1; n <= 12; ++n) {
      points.push_back(point(1.0 / n, 0.0, 0.0));
    }
    const auto [indices, representative] = extract_convergent_subsequence(points, 0.5);
    CHECK(indices.size() == 6);  // tail half
    CHECK(indices.front() == 6);
    CHECK(indices.back() == 11);
    CHECK((representative - points.back()).norm() == 0.0);
  }

  SUBCASE("alternating values pick the majority, ties the later") {
    std::vector<Vector> points;
    for (int n = 0; n < 12; ++n) {
      points.push_back(n % 2 == 0 ? point(0, 0, 0) : point(5, 5, 5));
    }
    const auto [indices, representative] = extract_convergent_subsequence(points, 1e-3);
    // Tail indices 6..11 hold three of each; the cluster ending last wins.
    CHECK(indices.size() == 3);
    CHECK((representative - points[11]).norm() == 0.0);
    for (int idx : indices) CHECK(idx % 2 == 1);
  }

  SUBCASE("an outlier in the tail is excluded") {
    std::vector<Vector> points;
    for (int n = 0; n < 16; ++n) points.push_back(point(1, 1, 1));
    points[12] = point(40, 0, 0);
    const auto [indices, representative] = extract_convergent_subsequence(points, 1e-3);
    CHECK(indices.size() == 7);
    for (int idx : indices) CHECK(idx != 12);
    CHECK((representative - point(1, 1, 1)).norm() == 0.0);
  }
}

TEST_CASE("affine homotopy stays in the ball and contracts") {
  const AffineHomotopy homotopy{{0.0, 0.0, 0.0}, {0.5, -0.25, 0.5}, 1.0};
  const ParameterSequence sequence(homotopy);
  double previous = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 32; ++n) {
    const Parameter u = sequence.at(n);
    CHECK(parameter_sup_norm(u) <= 1.0);
    const double dist = parameter_sup_norm(u);  // limit is zero here
    CHECK(dist <= previous);
    previous = dist;
  }
  CHECK(parameter_sup_norm(sequence.limit()) == 0.0);

  CHECK_THROWS_AS(ParameterSequence(AffineHomotopy{{0.9, 0, 0}, {0.5, 0, 0}, 1.0}),
                  PreconditionError);
}

TEST_CASE("explicit sequences are bounds-checked") {
  ExplicitSequence explicit_seq;
  for (int n = 0; n < 4; ++n) explicit_seq.items.push_back(constant_parameter(3, 0.1, 1.0));
  explicit_seq.limit = constant_parameter(3, 0.1, 1.0);
  const ParameterSequence sequence{explicit_seq};
  CHECK(sequence.length() == 4);
  CHECK_THROWS_AS(sequence.at(5), PreconditionError);
  CHECK_THROWS_AS(sequence.at(0), PreconditionError);
  CHECK_THROWS_AS(ParameterSequence(ExplicitSequence{}), PreconditionError);
}

TEST_CASE("run_study requires at least 8 terms") {
  const ActionContext context = make_action_context(emden::testing::sublinear_fixture());
  const ParameterSequence sequence(AffineHomotopy{{0, 0, 0}, {1, 1, 1}, 1.0});
  CHECK_THROWS_AS(run_study(context, sequence, 4, test_config()), PreconditionError);
}

TEST_CASE("constant sequence: identical solves, zero gap") {
  const ActionContext context = make_action_context(emden::testing::sublinear_fixture());
  ExplicitSequence explicit_seq;
  for (int n = 0; n < 8; ++n) explicit_seq.items.push_back(constant_parameter(3, 0.5, 1.0));
  explicit_seq.limit = constant_parameter(3, 0.5, 1.0);
  const StudyReport report =
      run_study(context, ParameterSequence{explicit_seq}, 8, test_config());

  REQUIRE(report.records.size() == 8);
  CHECK(report.all_converged);
  for (const auto& record : report.records) {
    CHECK((record.x - report.records.front().x).norm() <= 1e-8);
    CHECK((record.x - report.x_bar).norm() <= 1e-8);
  }
  CHECK(report.certification.limit_is_critical);
  CHECK(report.certification.limit_is_minimizer_candidate);
  CHECK(std::abs(report.certification.gap) <= 1e-9);
  CHECK_FALSE(report.certification.inconclusive);
}

TEST_CASE("homotopy study on the sublinear fixture") {
  const ActionContext context = make_action_context(emden::testing::sublinear_fixture());
  const ParameterSequence sequence(AffineHomotopy{{0, 0, 0}, {1, 1, 1}, 1.0});
  const int count = 16;
  const StudyReport report = run_study(context, sequence, count, test_config());

  CHECK(report.all_converged);
  // The limit problem is the f-free quadratic: x_bar is its closed form.
  CHECK((report.x_bar - workhorse_solution()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(report.certification.limit_is_critical);
  CHECK(report.certification.limit_is_minimizer_candidate);

  // J(0, u_n) = 0 for every n (the alpha bound with alpha = 0).
  CHECK(report.alpha_max_abs <= 1e-12);

  // Uniform norm bound is finite and attained.
  CHECK(std::isfinite(report.uniform_bound_c));
  for (const auto& record : report.records) {
    CHECK(record.x.norm() <= report.uniform_bound_c + 1e-15);
  }

  // O(1/n) contraction toward the limit on the extracted subsequence.
  const auto& rate = report.certification.convergence_rate_table;
  REQUIRE_FALSE(rate.empty());
  CHECK(report.tail_distances_nonincreasing);
  const auto& last = rate.back();
  CHECK(last.x_dist <= 2.0 * last.param_dist);  // observed Lipschitz-type bound
  CHECK(report.fit.rms >= 0.0);
  CHECK(std::isfinite(report.fit.a));

  // Bounded-derivative premise over the uniform-bound ball.
  CHECK(std::isfinite(report.gateaux_bound));
  CHECK(report.gateaux_bound > 0.0);

  // Records are solver successes, so they satisfy the solution tolerances.
  for (const auto& record : report.records) {
    CHECK(record.grad_norm <= 1e-10);
    CHECK(record.residual_norm <= 1e-8);
  }
}

TEST_CASE("certify_limit rejects perturbed candidates") {
  const ActionContext context = make_action_context(emden::testing::quadratic_fixture());
  const Parameter u = constant_parameter(3, 0.0, 1.0);
  const Certification good = certify_limit(context, workhorse_solution(), u, test_config());
  CHECK(good.limit_is_critical);
  CHECK(good.limit_is_minimizer_candidate);

  Vector perturbed = workhorse_solution();
  perturbed(0) += 0.1;
  const Certification bad = certify_limit(context, perturbed, u, test_config());
  CHECK_FALSE(bad.limit_is_critical);
}

TEST_CASE("coercivity fit reproduces a synthetic power law") {
  CoercivityEvidence evidence;
  evidence.direction = CoercivityDirection::Coercive;
  for (double radius : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    evidence.table.push_back({radius, 0.5 * radius * radius - 3.0, radius * radius});
  }
  const CoercivityFit fit = fit_coercivity_constants(evidence);
  CHECK(fit.a == doctest::Approx(0.5).epsilon(0.05));
  CHECK(fit.mu == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit.b == doctest::Approx(-3.0).epsilon(0.2));
  CHECK(fit.rms <= 0.5);
}

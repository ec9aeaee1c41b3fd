#include "emden/dependence.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace emden {
namespace {

double sup_dist(const Parameter& a, const Parameter& b) {
  double best = 0.0;
  for (std::size_t k = 1; k < a.values.size(); ++k) {
    best = std::max(best, std::abs(a.values[k] - b.values[k]));
  }
  return best;
}

}  // namespace

ParameterSequence::ParameterSequence(AffineHomotopy homotopy) : rule_(std::move(homotopy)) {
  const auto& h = std::get<AffineHomotopy>(rule_);
  if (h.limit.size() != h.direction.size()) {
    throw PreconditionError("homotopy limit and direction lengths differ");
  }
  std::vector<double> first(h.limit.size());
  for (std::size_t i = 0; i < first.size(); ++i) first[i] = h.limit[i] + h.direction[i];
  make_parameter(first, h.bound);   // throws when u_1 leaves the ball
  make_parameter(h.limit, h.bound); // and likewise for the limit
}

ParameterSequence::ParameterSequence(ExplicitSequence sequence) : rule_(std::move(sequence)) {
  if (std::get<ExplicitSequence>(rule_).items.empty()) {
    throw PreconditionError("explicit parameter sequence is empty");
  }
}

Parameter ParameterSequence::at(int n) const {
  if (n < 1) throw PreconditionError("sequence index must be >= 1");
  if (const auto* h = std::get_if<AffineHomotopy>(&rule_)) {
    std::vector<double> values(h->limit.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = h->limit[i] + h->direction[i] / static_cast<double>(n);
    }
    return make_parameter(values, h->bound);
  }
  const auto& items = std::get<ExplicitSequence>(rule_).items;
  if (n > static_cast<int>(items.size())) {
    throw PreconditionError("sequence index exceeds the explicit list");
  }
  return items[static_cast<std::size_t>(n - 1)];
}

Parameter ParameterSequence::limit() const {
  if (const auto* h = std::get_if<AffineHomotopy>(&rule_)) {
    return make_parameter(h->limit, h->bound);
  }
  return std::get<ExplicitSequence>(rule_).limit;
}

int ParameterSequence::length() const {
  if (std::holds_alternative<AffineHomotopy>(rule_)) return INT_MAX;
  return static_cast<int>(std::get<ExplicitSequence>(rule_).items.size());
}

std::pair<std::vector<int>, Vector> extract_convergent_subsequence(
    const std::vector<Vector>& points, double tol_cluster) {
  if (points.empty()) {
    throw PreconditionError("subsequence extraction requires a nonempty list");
  }
  for (const Vector& p : points) {
    if (!p.allFinite()) {
      throw PreconditionError("subsequence extraction requires finite entries");
    }
  }
  const int m = static_cast<int>(points.size());
  const int tail_begin = m / 2;
  const int tail_size = m - tail_begin;

  // Union-find over the tail; single linkage joins points within tol.
  std::vector<int> parent(static_cast<std::size_t>(tail_size));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (int i = 0; i < tail_size; ++i) {
    for (int j = i + 1; j < tail_size; ++j) {
      const double dist = (points[static_cast<std::size_t>(tail_begin + i)] -
                           points[static_cast<std::size_t>(tail_begin + j)])
                              .norm();
      if (dist <= tol_cluster) {
        parent[static_cast<std::size_t>(find(i))] = find(j);
      }
    }
  }

  // Largest cluster; ties prefer the one whose last member appears last.
  std::vector<int> size(static_cast<std::size_t>(tail_size), 0);
  std::vector<int> last(static_cast<std::size_t>(tail_size), -1);
  for (int i = 0; i < tail_size; ++i) {
    const int root = find(i);
    ++size[static_cast<std::size_t>(root)];
    last[static_cast<std::size_t>(root)] = i;
  }
  int best_root = -1;
  for (int i = 0; i < tail_size; ++i) {
    const int root = find(i);
    if (root != i) continue;
    if (best_root < 0 || size[static_cast<std::size_t>(root)] > size[static_cast<std::size_t>(best_root)] ||
        (size[static_cast<std::size_t>(root)] == size[static_cast<std::size_t>(best_root)] &&
         last[static_cast<std::size_t>(root)] > last[static_cast<std::size_t>(best_root)])) {
      best_root = root;
    }
  }

  std::vector<int> indices;
  for (int i = 0; i < tail_size; ++i) {
    if (find(i) == best_root) indices.push_back(tail_begin + i);
  }
  return {indices, points[static_cast<std::size_t>(indices.back())]};
}

Certification certify_limit(const ActionContext& context, const Vector& x_bar,
                            const Parameter& u_bar, const SolveConfig& config) {
  Certification certification;
  const VuCertificate membership = verify_membership(context, u_bar, x_bar, config);
  certification.limit_is_critical = membership.is_critical;
  certification.gap = membership.gap_to_best_start;
  certification.limit_is_minimizer_candidate = membership.gap_to_best_start <= 1e-6;
  return certification;
}

CoercivityFit fit_coercivity_constants(const CoercivityEvidence& evidence) {
  CoercivityFit best;
  best.rms = std::numeric_limits<double>::infinity();
  const auto& table = evidence.table;
  if (table.size() < 3) return best;
  const int m = static_cast<int>(table.size());

  for (double mu = 0.05; mu <= 4.0 + 1e-12; mu += 0.05) {
    // Linear least squares in (a, b) for fixed mu.
    double s_rr = 0.0, s_r = 0.0, s_ry = 0.0, s_y = 0.0;
    for (const auto& row : table) {
      const double basis = std::pow(row.radius, mu);
      s_rr += basis * basis;
      s_r += basis;
      s_ry += basis * row.sphere_min;
      s_y += row.sphere_min;
    }
    const double det = s_rr * m - s_r * s_r;
    if (std::abs(det) < 1e-14) continue;
    const double a = (s_ry * m - s_r * s_y) / det;
    const double b = (s_rr * s_y - s_r * s_ry) / det;
    double sse = 0.0;
    for (const auto& row : table) {
      const double err = a * std::pow(row.radius, mu) + b - row.sphere_min;
      sse += err * err;
    }
    const double rms = std::sqrt(sse / m);
    if (rms < best.rms) {
      best = {a, mu, b, rms};
    }
  }
  return best;
}

StudyReport run_study(const ActionContext& context, const ParameterSequence& sequence,
                      int count, const SolveConfig& config) {
  if (count < 8) {
    throw PreconditionError("study requires at least 8 sequence terms");
  }
  if (count > sequence.length()) {
    throw PreconditionError("study length exceeds the sequence");
  }

  StudyReport report;
  report.orientation = context.orientation;
  const Parameter u_bar = sequence.limit();
  const int n_interior = context.instance.grid.interior_count;

  report.alpha_observed = -std::numeric_limits<double>::infinity();
  report.all_converged = true;
  std::vector<Vector> converged_points;
  std::vector<int> converged_n;
  Vector warm;
  bool have_warm = false;

  for (int n = 1; n <= count; ++n) {
    const Parameter u = sequence.at(n);
    StudyRecord record;
    record.n = n;
    record.param_norm = parameter_sup_norm(u);
    record.param_dist_to_limit = sup_dist(u, u_bar);

    const double at_zero = action_value(context, Vector::Zero(n_interior), u);
    report.alpha_observed = std::max(report.alpha_observed, at_zero);
    report.alpha_max_abs = std::max(report.alpha_max_abs, std::abs(at_zero));

    try {
      std::vector<Vector> extras;
      if (have_warm) extras.push_back(warm);
      const SolveReport solve = minimize_action(context, u, config, extras);
      record.x = solve.x_star;
      record.value = solve.J_star;
      record.grad_norm = solve.grad_norm;
      record.residual_norm = solve.residual_norm;
      record.converged = true;
      warm = solve.x_star;
      have_warm = true;
      converged_points.push_back(solve.x_star);
      converged_n.push_back(n);
    } catch (const NonConvergenceError& failure) {
      record.x = failure.best_point();
      record.value = failure.best_value();
      record.grad_norm = failure.gradient_norm();
      record.residual_norm = std::numeric_limits<double>::quiet_NaN();
      record.converged = false;
      report.all_converged = false;
    }
    report.uniform_bound_c = std::max(report.uniform_bound_c, record.x.norm());
    report.records.push_back(std::move(record));
  }

  report.coercivity = coercivity_probe(context, u_bar);
  report.fit = fit_coercivity_constants(report.coercivity);
  {
    const std::vector<Parameter> samples{sequence.at(1), sequence.at((count + 1) / 2), u_bar};
    const double halfwidth = std::max(report.uniform_bound_c, 1.0) /
                             std::sqrt(static_cast<double>(n_interior));
    report.gateaux_bound = gateaux_bound_probe(context, halfwidth, samples);
  }

  if (converged_points.empty()) {
    report.certification.inconclusive = true;
    report.x_bar = Vector::Zero(n_interior);
    report.subsequence_representative = Vector::Zero(n_interior);
    return report;
  }

  auto [indices, representative] = extract_convergent_subsequence(converged_points);
  for (int idx : indices) {
    report.subsequence_indices.push_back(converged_n[static_cast<std::size_t>(idx)]);
  }
  report.subsequence_representative = representative;

  // Solve the limit problem independently; among its distinct minima the
  // one closest to the subsequence representative is the limit candidate.
  bool limit_solve_failed = false;
  try {
    const SolveReport limit_solve = minimize_action(context, u_bar, config);
    report.x_bar = limit_solve.x_star;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const MinimumCluster& cluster : limit_solve.distinct_minima) {
      const double dist = (cluster.x - representative).norm();
      if (dist < best_dist) {
        best_dist = dist;
        report.x_bar = cluster.x;
      }
    }
  } catch (const NonConvergenceError&) {
    limit_solve_failed = true;
    report.x_bar = representative;
  }
  report.representative_gap = (report.subsequence_representative - report.x_bar).norm();

  report.certification = certify_limit(context, report.x_bar, u_bar, config);
  report.certification.inconclusive = limit_solve_failed;

  for (int idx : indices) {
    const auto& record = report.records[static_cast<std::size_t>(
        converged_n[static_cast<std::size_t>(idx)] - 1)];
    RateRow row;
    row.n = record.n;
    row.param_dist = record.param_dist_to_limit;
    row.x_dist = (record.x - report.x_bar).norm();
    row.ratio = row.param_dist > 0.0 ? row.x_dist / row.param_dist : 0.0;
    report.certification.convergence_rate_table.push_back(row);
  }

  // Distances to the candidate must not increase beyond the first third of
  // the extracted subsequence.
  const auto& rate = report.certification.convergence_rate_table;
  report.tail_distances_nonincreasing = true;
  const std::size_t start = rate.size() / 3;
  for (std::size_t i = start + 1; i < rate.size(); ++i) {
    if (rate[i].x_dist > rate[i - 1].x_dist + 1e-12) {
      report.tail_distances_nonincreasing = false;
    }
  }
  return report;
}

}  // namespace emden

#include "emden/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace emden::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

void require_object(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
}

void check_keys(const json& node, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      fail(path + "/" + it.key(), "unknown key");
    }
  }
}

const json* find(const json& node, const std::string& key) {
  auto it = node.find(key);
  return it == node.end() ? nullptr : &*it;
}

double get_number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

int get_integer(const json& node, const std::string& path) {
  if (!node.is_number_integer()) fail(path, "expected an integer");
  return node.get<int>();
}

std::string get_string(const json& node, const std::string& path) {
  if (!node.is_string()) fail(path, "expected a string");
  return node.get<std::string>();
}

// Accepts either an array of `size` numbers or a single number meaning a
// constant sequence.
std::vector<double> get_sequence(const json& node, const std::string& path,
                                 std::size_t size) {
  if (node.is_number()) {
    return std::vector<double>(size, node.get<double>());
  }
  if (!node.is_array()) fail(path, "expected an array of numbers or a number");
  if (node.size() != size) {
    fail(path, "expected " + std::to_string(size) + " entries, got " +
                   std::to_string(node.size()));
  }
  std::vector<double> values;
  values.reserve(size);
  for (std::size_t i = 0; i < node.size(); ++i) {
    values.push_back(get_number(node[i], path + "/" + std::to_string(i)));
  }
  return values;
}

ProblemInstance parse_problem(const json& node) {
  require_object(node, "/problem");
  check_keys(node, "/problem", {"T", "boundary", "p", "q", "g", "nonlinearity"});

  const json* t_node = find(node, "T");
  if (!t_node) fail("/problem/T", "missing key");
  const int n = get_integer(*t_node, "/problem/T");
  if (n < 3) fail("/problem/T", "Grid invariant T >= 3 violated, got " + std::to_string(n));

  BoundarySpec boundary = PeriodicBoundary{};
  if (const json* b = find(node, "boundary")) {
    require_object(*b, "/problem/boundary");
    const json* kind = find(*b, "kind");
    if (!kind) fail("/problem/boundary/kind", "missing key");
    const std::string kind_str = get_string(*kind, "/problem/boundary/kind");
    if (kind_str == "periodic") {
      check_keys(*b, "/problem/boundary", {"kind"});
    } else if (kind_str == "mixed") {
      check_keys(*b, "/problem/boundary", {"kind", "alpha1", "beta1", "a1", "b1"});
      MixedBoundary mixed;
      if (const json* v = find(*b, "alpha1")) mixed.alpha1 = get_number(*v, "/problem/boundary/alpha1");
      if (const json* v = find(*b, "beta1")) mixed.beta1 = get_number(*v, "/problem/boundary/beta1");
      if (const json* v = find(*b, "a1")) mixed.a1 = get_number(*v, "/problem/boundary/a1");
      if (const json* v = find(*b, "b1")) mixed.b1 = get_number(*v, "/problem/boundary/b1");
      boundary = mixed;
    } else {
      fail("/problem/boundary/kind", "expected \"periodic\" or \"mixed\"");
    }
  }

  const json* p_node = find(node, "p");
  const json* q_node = find(node, "q");
  const json* g_node = find(node, "g");
  if (!p_node) fail("/problem/p", "missing key");
  if (!q_node) fail("/problem/q", "missing key");
  if (!g_node) fail("/problem/g", "missing key");
  const auto p = get_sequence(*p_node, "/problem/p", static_cast<std::size_t>(n + 2));
  const auto q = get_sequence(*q_node, "/problem/q", static_cast<std::size_t>(n));
  const auto g = get_sequence(*g_node, "/problem/g", static_cast<std::size_t>(n));

  const json* f_node = find(node, "nonlinearity");
  if (!f_node) fail("/problem/nonlinearity", "missing key");
  require_object(*f_node, "/problem/nonlinearity");
  const json* f_kind = find(*f_node, "kind");
  if (!f_kind) fail("/problem/nonlinearity/kind", "missing key");
  if (get_string(*f_kind, "/problem/nonlinearity/kind") != "power") {
    fail("/problem/nonlinearity/kind", "only the \"power\" family is configurable");
  }
  check_keys(*f_node, "/problem/nonlinearity", {"kind", "r", "gamma", "c0", "c1", "offset"});
  const json* r_node = find(*f_node, "r");
  if (!r_node) fail("/problem/nonlinearity/r", "missing key");
  const double r = get_number(*r_node, "/problem/nonlinearity/r");
  std::vector<double> gamma(static_cast<std::size_t>(n), 1.0);
  if (const json* v = find(*f_node, "gamma")) {
    gamma = get_sequence(*v, "/problem/nonlinearity/gamma", static_cast<std::size_t>(n));
  }
  double c0 = 0.0, c1 = 0.0, offset = 0.0;
  if (const json* v = find(*f_node, "c0")) c0 = get_number(*v, "/problem/nonlinearity/c0");
  if (const json* v = find(*f_node, "c1")) c1 = get_number(*v, "/problem/nonlinearity/c1");
  if (const json* v = find(*f_node, "offset")) offset = get_number(*v, "/problem/nonlinearity/offset");

  ProblemInstance instance{Grid{n}, boundary, make_coefficients(p, q, g),
                           make_power_modulated(r, gamma, c0, c1, offset)};
  const ValidationReport report = validate_problem(instance);
  if (!report.ok()) {
    std::string message = "problem invariants violated:";
    for (const Violation& v : report.violations) {
      message += "\n  " + v.where + ": " + v.message;
    }
    throw ConfigError(message);
  }
  return instance;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  require_object(doc, "/");
  check_keys(doc, "", {"problem", "parameter", "sequence", "oracle", "verify", "solver", "output"});

  const json* problem_node = find(doc, "problem");
  if (!problem_node) fail("/problem", "missing key");

  RunConfig config;
  config.problem = parse_problem(*problem_node);
  const int n = config.problem.grid.interior_count;

  if (const json* node = find(doc, "parameter")) {
    require_object(*node, "/parameter");
    check_keys(*node, "/parameter", {"values", "M"});
    const json* values_node = find(*node, "values");
    const json* bound_node = find(*node, "M");
    if (!values_node) fail("/parameter/values", "missing key");
    if (!bound_node) fail("/parameter/M", "missing key");
    const auto values = get_sequence(*values_node, "/parameter/values", static_cast<std::size_t>(n));
    const double bound = get_number(*bound_node, "/parameter/M");
    try {
      config.parameter = make_parameter(values, bound);
    } catch (const PreconditionError& e) {
      fail("/parameter/values", e.what());
    }
    config.parameter_bound = bound;
  }

  if (const json* node = find(doc, "sequence")) {
    require_object(*node, "/sequence");
    const json* kind = find(*node, "kind");
    if (!kind) fail("/sequence/kind", "missing key");
    SequenceSpec spec;
    spec.kind = get_string(*kind, "/sequence/kind");
    const json* bound_node = find(*node, "M");
    if (!bound_node) fail("/sequence/M", "missing key");
    spec.bound = get_number(*bound_node, "/sequence/M");
    if (spec.kind == "affine") {
      check_keys(*node, "/sequence", {"kind", "ubar", "v", "N", "M"});
      const json* ubar = find(*node, "ubar");
      const json* v = find(*node, "v");
      const json* count = find(*node, "N");
      if (!ubar) fail("/sequence/ubar", "missing key");
      if (!v) fail("/sequence/v", "missing key");
      if (!count) fail("/sequence/N", "missing key");
      spec.limit = get_sequence(*ubar, "/sequence/ubar", static_cast<std::size_t>(n));
      spec.direction = get_sequence(*v, "/sequence/v", static_cast<std::size_t>(n));
      spec.count = get_integer(*count, "/sequence/N");
    } else if (spec.kind == "explicit") {
      check_keys(*node, "/sequence", {"kind", "items", "limit", "M"});
      const json* items = find(*node, "items");
      const json* limit = find(*node, "limit");
      if (!items) fail("/sequence/items", "missing key");
      if (!limit) fail("/sequence/limit", "missing key");
      if (!items->is_array()) fail("/sequence/items", "expected an array");
      for (std::size_t i = 0; i < items->size(); ++i) {
        spec.items.push_back(get_sequence((*items)[i], "/sequence/items/" + std::to_string(i),
                                          static_cast<std::size_t>(n)));
      }
      spec.limit = get_sequence(*limit, "/sequence/limit", static_cast<std::size_t>(n));
      spec.count = static_cast<int>(spec.items.size());
    } else {
      fail("/sequence/kind", "expected \"affine\" or \"explicit\"");
    }
    try {
      make_parameter(spec.limit, spec.bound);
      if (spec.kind == "affine") {
        std::vector<double> first(spec.limit.size());
        for (std::size_t i = 0; i < first.size(); ++i) first[i] = spec.limit[i] + spec.direction[i];
        make_parameter(first, spec.bound);
      } else {
        for (const auto& item : spec.items) make_parameter(item, spec.bound);
      }
    } catch (const PreconditionError& e) {
      fail("/sequence", e.what());
    }
    config.sequence = spec;
    if (config.parameter_bound == 0.0) config.parameter_bound = spec.bound;
  }

  if (const json* node = find(doc, "oracle")) {
    require_object(*node, "/oracle");
    check_keys(*node, "/oracle", {"box_halfwidth", "steps_per_axis"});
    OracleSpec spec;
    if (const json* v = find(*node, "box_halfwidth")) spec.box_halfwidth = get_number(*v, "/oracle/box_halfwidth");
    if (const json* v = find(*node, "steps_per_axis")) spec.steps_per_axis = get_integer(*v, "/oracle/steps_per_axis");
    config.oracle = spec;
  }

  if (const json* node = find(doc, "verify")) {
    require_object(*node, "/verify");
    check_keys(*node, "/verify", {"x", "solution"});
    VerifySpec spec;
    if (const json* v = find(*node, "x")) {
      spec.x = get_sequence(*v, "/verify/x", static_cast<std::size_t>(n));
    }
    if (const json* v = find(*node, "solution")) {
      spec.solution_csv = get_string(*v, "/verify/solution");
    }
    config.verify = spec;
  }

  if (const json* node = find(doc, "solver")) {
    require_object(*node, "/solver");
    check_keys(*node, "/solver", {"grad_tol", "max_iters", "multistart_count", "start_radius", "seed"});
    if (const json* v = find(*node, "grad_tol")) config.solver.grad_tol = get_number(*v, "/solver/grad_tol");
    if (const json* v = find(*node, "max_iters")) config.solver.max_iters = get_integer(*v, "/solver/max_iters");
    if (const json* v = find(*node, "multistart_count"))
      config.solver.multistart_count = get_integer(*v, "/solver/multistart_count");
    if (const json* v = find(*node, "start_radius")) config.solver.start_radius = get_number(*v, "/solver/start_radius");
    if (const json* v = find(*node, "seed")) {
      if (!v->is_number_integer()) fail("/solver/seed", "expected an integer");
      config.solver.seed = v->get<std::uint64_t>();
    }
    if (!(config.solver.grad_tol > 0.0) || !(config.solver.grad_tol < 1e-4)) {
      fail("/solver/grad_tol", "SolveConfig invariant 0 < grad_tol < 1e-4 violated");
    }
    if (config.solver.max_iters <= 0) fail("/solver/max_iters", "must be positive");
    if (config.solver.multistart_count <= 0) fail("/solver/multistart_count", "must be positive");
    if (!(config.solver.start_radius > 0.0)) fail("/solver/start_radius", "must be positive");
  }

  if (const json* node = find(doc, "output")) {
    require_object(*node, "/output");
    check_keys(*node, "/output", {"dir", "formats"});
    if (const json* v = find(*node, "dir")) config.out_dir = get_string(*v, "/output/dir");
    if (const json* v = find(*node, "formats")) {
      if (!v->is_array()) fail("/output/formats", "expected an array");
      config.write_json = false;
      config.write_csv = false;
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string format = get_string((*v)[i], "/output/formats/" + std::to_string(i));
        if (format == "json") {
          config.write_json = true;
        } else if (format == "csv") {
          config.write_csv = true;
        } else {
          fail("/output/formats/" + std::to_string(i), "expected \"json\" or \"csv\"");
        }
      }
    }
  }

  return config;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  return parse_config(doc);
}

namespace {

ordered_json vector_json(const Vector& v) {
  ordered_json array = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) array.push_back(v(i));
  return array;
}

ordered_json interior_json(const std::vector<double>& padded) {
  ordered_json array = ordered_json::array();
  for (std::size_t k = 1; k < padded.size(); ++k) array.push_back(padded[k]);
  return array;
}

std::string orientation_name(Orientation orientation) {
  return orientation == Orientation::MaximizeNegated ? "maximize_negated" : "minimize";
}

std::string direction_name(CoercivityDirection direction) {
  switch (direction) {
    case CoercivityDirection::Coercive: return "coercive";
    case CoercivityDirection::AntiCoercive: return "anti_coercive";
    default: return "inconclusive";
  }
}

std::string definiteness_name(Definiteness definiteness) {
  switch (definiteness) {
    case Definiteness::PositiveDefinite: return "positive_definite";
    case Definiteness::NegativeDefinite: return "negative_definite";
    case Definiteness::Indefinite: return "indefinite";
    default: return "singular";
  }
}

std::string verdict_name(VerdictClass verdict) {
  switch (verdict) {
    case VerdictClass::Sublinear: return "sublinear";
    case VerdictClass::Superlinear: return "superlinear";
    case VerdictClass::LinearPositiveWindow: return "linear_positive_window";
    case VerdictClass::LinearNegativeWindow: return "linear_negative_window";
    default: return "unverified";
  }
}

ordered_json coercivity_json(const CoercivityEvidence& evidence) {
  ordered_json j;
  j["direction"] = direction_name(evidence.direction);
  j["value_at_origin"] = evidence.value_at_origin;
  ordered_json table = ordered_json::array();
  for (const auto& row : evidence.table) {
    ordered_json r;
    r["radius"] = row.radius;
    r["sphere_min"] = row.sphere_min;
    r["sphere_max"] = row.sphere_max;
    table.push_back(r);
  }
  j["table"] = table;
  return j;
}

ordered_json solver_json(const SolveConfig& config) {
  ordered_json j;
  j["grad_tol"] = config.grad_tol;
  j["max_iters"] = config.max_iters;
  j["multistart_count"] = config.multistart_count;
  j["start_radius"] = config.start_radius;
  j["seed"] = config.seed;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << text;
}

void write_json_report(const std::filesystem::path& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::filesystem::path prepare_out_dir(const RunConfig& config, const CommandOptions& options) {
  std::filesystem::path dir = options.out_dir.empty() ? std::filesystem::path(config.out_dir)
                                                      : options.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

const Parameter& require_parameter(const RunConfig& config, const char* command) {
  if (!config.parameter) {
    throw ConfigError(std::string("/parameter: required by the ") + command + " command");
  }
  return *config.parameter;
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

nlohmann::ordered_json canonical_config(const RunConfig& config) {
  ordered_json doc;
  ordered_json problem;
  problem["T"] = config.problem.grid.interior_count;
  ordered_json boundary;
  if (const auto* mixed = std::get_if<MixedBoundary>(&config.problem.boundary)) {
    boundary["kind"] = "mixed";
    boundary["alpha1"] = mixed->alpha1;
    boundary["beta1"] = mixed->beta1;
    boundary["a1"] = mixed->a1;
    boundary["b1"] = mixed->b1;
  } else {
    boundary["kind"] = "periodic";
  }
  problem["boundary"] = boundary;
  problem["p"] = config.problem.coefficients.p;
  problem["q"] = interior_json(config.problem.coefficients.q);
  problem["g"] = interior_json(config.problem.coefficients.g);
  const auto& pm = std::get<PowerModulated>(config.problem.nonlinearity);
  ordered_json nonlinearity;
  nonlinearity["kind"] = "power";
  nonlinearity["r"] = pm.exponent;
  nonlinearity["gamma"] = interior_json(pm.base);
  nonlinearity["c0"] = pm.c0;
  nonlinearity["c1"] = pm.c1;
  nonlinearity["offset"] = pm.offset;
  problem["nonlinearity"] = nonlinearity;
  doc["problem"] = problem;

  if (config.parameter) {
    ordered_json parameter;
    parameter["values"] = interior_json(config.parameter->values);
    parameter["M"] = config.parameter->bound;
    doc["parameter"] = parameter;
  }
  if (config.sequence) {
    ordered_json sequence;
    sequence["kind"] = config.sequence->kind;
    if (config.sequence->kind == "affine") {
      sequence["ubar"] = config.sequence->limit;
      sequence["v"] = config.sequence->direction;
      sequence["N"] = config.sequence->count;
    } else {
      sequence["items"] = config.sequence->items;
      sequence["limit"] = config.sequence->limit;
    }
    sequence["M"] = config.sequence->bound;
    doc["sequence"] = sequence;
  }
  if (config.oracle) {
    ordered_json oracle;
    oracle["box_halfwidth"] = config.oracle->box_halfwidth;
    oracle["steps_per_axis"] = config.oracle->steps_per_axis;
    doc["oracle"] = oracle;
  }
  if (config.verify) {
    ordered_json verify;
    if (config.verify->x) verify["x"] = *config.verify->x;
    if (config.verify->solution_csv) verify["solution"] = *config.verify->solution_csv;
    doc["verify"] = verify;
  }
  doc["solver"] = solver_json(config.solver);
  ordered_json output;
  output["dir"] = config.out_dir;
  ordered_json formats = ordered_json::array();
  if (config.write_json) formats.push_back("json");
  if (config.write_csv) formats.push_back("csv");
  output["formats"] = formats;
  doc["output"] = output;
  return doc;
}

int command_solve(const RunConfig& config, const CommandOptions& options) {
  const Parameter& u = require_parameter(config, "solve");
  const auto dir = prepare_out_dir(config, options);

  const ActionContext base = make_action_context(config.problem);
  const OrientedContext oriented = orient_for_minimization(base, u);
  const SolveReport report = minimize_action(oriented.context, u, config.solver);

  if (config.write_json) {
    ordered_json j;
    j["command"] = "solve";
    j["orientation"] = orientation_name(report.orientation);
    j["coercivity"] = coercivity_json(oriented.evidence);
    j["x_star"] = vector_json(report.x_star);
    j["J_star"] = report.J_star;
    j["grad_norm"] = report.grad_norm;
    j["residual_norm"] = report.residual_norm;
    j["starts_converged"] = report.starts_converged;
    ordered_json minima = ordered_json::array();
    for (const auto& cluster : report.distinct_minima) {
      ordered_json c;
      c["x"] = vector_json(cluster.x);
      c["value"] = cluster.value;
      minima.push_back(c);
    }
    j["distinct_minima"] = minima;
    j["solver"] = solver_json(config.solver);
    write_json_report(dir / "solve_report.json", j);
  }
  if (config.write_csv) {
    std::string csv = "k,x\n";
    for (Eigen::Index i = 0; i < report.x_star.size(); ++i) {
      csv += std::to_string(i + 1) + "," + format_number(report.x_star(i)) + "\n";
    }
    write_text(dir / "solution.csv", csv);
  }
  if (!options.quiet) {
    std::cout << "solve: J_star = " << format_number(report.J_star)
              << ", grad_norm = " << format_number(report.grad_norm)
              << ", residual_norm = " << format_number(report.residual_norm)
              << ", orientation = " << orientation_name(report.orientation) << "\n";
  }
  return kExitOk;
}

int command_study(const RunConfig& config, const CommandOptions& options) {
  if (!config.sequence) {
    throw ConfigError("/sequence: required by the study command");
  }
  const auto dir = prepare_out_dir(config, options);
  const SequenceSpec& spec = *config.sequence;

  ParameterSequence sequence =
      spec.kind == "affine"
          ? ParameterSequence(AffineHomotopy{spec.limit, spec.direction, spec.bound})
          : ParameterSequence([&] {
              ExplicitSequence explicit_seq;
              for (const auto& item : spec.items) {
                explicit_seq.items.push_back(make_parameter(item, spec.bound));
              }
              explicit_seq.limit = make_parameter(spec.limit, spec.bound);
              return explicit_seq;
            }());

  const ActionContext base = make_action_context(config.problem);
  const OrientedContext oriented = orient_for_minimization(base, sequence.limit());
  const StudyReport report = run_study(oriented.context, sequence, spec.count, config.solver);

  if (config.write_json) {
    ordered_json j;
    j["command"] = "study";
    j["orientation"] = orientation_name(report.orientation);
    j["count"] = spec.count;
    ordered_json records = ordered_json::array();
    for (const auto& record : report.records) {
      ordered_json r;
      r["n"] = record.n;
      r["param_norm"] = record.param_norm;
      r["param_dist_to_limit"] = record.param_dist_to_limit;
      r["x"] = vector_json(record.x);
      r["value"] = record.value;
      r["grad_norm"] = record.grad_norm;
      r["residual_norm"] = record.residual_norm;
      r["converged"] = record.converged;
      records.push_back(r);
    }
    j["records"] = records;
    j["uniform_bound_c"] = report.uniform_bound_c;
    j["alpha_observed"] = report.alpha_observed;
    j["alpha_max_abs"] = report.alpha_max_abs;
    j["subsequence_indices"] = report.subsequence_indices;
    j["subsequence_representative"] = vector_json(report.subsequence_representative);
    j["x_bar"] = vector_json(report.x_bar);
    j["representative_gap"] = report.representative_gap;
    j["tail_distances_nonincreasing"] = report.tail_distances_nonincreasing;
    ordered_json certification;
    certification["limit_is_critical"] = report.certification.limit_is_critical;
    certification["limit_is_minimizer_candidate"] = report.certification.limit_is_minimizer_candidate;
    certification["inconclusive"] = report.certification.inconclusive;
    certification["gap"] = report.certification.gap;
    ordered_json rate = ordered_json::array();
    for (const auto& row : report.certification.convergence_rate_table) {
      ordered_json r;
      r["n"] = row.n;
      r["param_dist"] = row.param_dist;
      r["x_dist"] = row.x_dist;
      r["ratio"] = row.ratio;
      rate.push_back(r);
    }
    certification["convergence_rate_table"] = rate;
    j["certification"] = certification;
    ordered_json fit;
    fit["a"] = report.fit.a;
    fit["mu"] = report.fit.mu;
    fit["b"] = report.fit.b;
    fit["rms"] = report.fit.rms;
    j["coercivity_fit"] = fit;
    j["coercivity"] = coercivity_json(report.coercivity);
    j["gateaux_bound"] = report.gateaux_bound;
    j["all_converged"] = report.all_converged;
    j["solver"] = solver_json(config.solver);
    write_json_report(dir / "study_report.json", j);
  }
  if (config.write_csv) {
    std::string csv = "n,J,grad_norm,residual_norm,dist_to_limit\n";
    for (const auto& record : report.records) {
      csv += std::to_string(record.n) + "," + format_number(record.value) + "," +
             format_number(record.grad_norm) + "," + format_number(record.residual_norm) +
             "," + format_number((record.x - report.x_bar).norm()) + "\n";
    }
    write_text(dir / "study_table.csv", csv);
  }
  const bool certified = report.certification.limit_is_critical &&
                         report.certification.limit_is_minimizer_candidate &&
                         !report.certification.inconclusive;
  if (!options.quiet) {
    std::cout << "study: uniform_bound_c = " << format_number(report.uniform_bound_c)
              << ", certification = " << (certified ? "pass" : "fail") << "\n";
  }
  return certified ? kExitOk : kExitCertification;
}

int command_verify(const RunConfig& config, const CommandOptions& options) {
  const Parameter& u = require_parameter(config, "verify");
  if (!config.verify || (!config.verify->x && !config.verify->solution_csv)) {
    throw ConfigError("/verify: an \"x\" array or a \"solution\" CSV path is required");
  }
  const auto dir = prepare_out_dir(config, options);
  const int n = config.problem.grid.interior_count;

  Vector x(n);
  if (config.verify->x) {
    for (int i = 0; i < n; ++i) x(i) = (*config.verify->x)[static_cast<std::size_t>(i)];
  } else {
    std::ifstream file(*config.verify->solution_csv);
    if (!file) throw ConfigError("/verify/solution: cannot read " + *config.verify->solution_csv);
    std::string line;
    std::getline(file, line);  // header
    int read = 0;
    while (std::getline(file, line) && read < n) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) break;
      x(read++) = std::stod(line.substr(comma + 1));
    }
    if (read != n) {
      throw ConfigError("/verify/solution: expected " + std::to_string(n) + " rows, got " +
                        std::to_string(read));
    }
  }

  const ActionContext base = make_action_context(config.problem);
  const OrientedContext oriented = orient_for_minimization(base, u);
  const VuCertificate certificate = verify_membership(oriented.context, u, x, config.solver);

  if (config.write_json) {
    ordered_json j;
    j["command"] = "verify";
    j["orientation"] = orientation_name(oriented.context.orientation);
    j["x"] = vector_json(x);
    j["is_critical"] = certificate.is_critical;
    j["is_global_candidate"] = certificate.is_global_candidate;
    j["gap_to_best_start"] = certificate.gap_to_best_start;
    j["grad_norm"] = certificate.grad_norm;
    j["residual_norm"] = certificate.residual_norm;
    write_json_report(dir / "verify_report.json", j);
  }
  const bool ok = certificate.is_critical && certificate.is_global_candidate;
  if (!options.quiet) {
    std::cout << "verify: is_critical = " << (certificate.is_critical ? "true" : "false")
              << ", is_global_candidate = " << (certificate.is_global_candidate ? "true" : "false")
              << "\n";
  }
  return ok ? kExitOk : kExitCertification;
}

int command_operators(const RunConfig& config, const CommandOptions& options) {
  const auto dir = prepare_out_dir(config, options);
  const QuadraticOperator op = build_operator(config.problem);
  const SpectralReport spectral = spectral_report(op);

  if (config.write_json) {
    ordered_json j;
    j["command"] = "operators";
    j["boundary"] = is_periodic(config.problem) ? "periodic" : "mixed";
    j["lambda_min"] = spectral.lambda_min;
    j["lambda_max"] = spectral.lambda_max;
    j["definiteness"] = definiteness_name(spectral.definiteness);
    j["definiteness_constant"] = spectral.definiteness_constant();
    j["operator_norm"] = spectral.operator_norm;
    j["tol"] = spectral.tol;
    write_json_report(dir / "spectral_report.json", j);
  }
  if (config.write_csv) {
    const Eigen::Index n = op.matrix.rows();
    std::string csv = "k";
    for (Eigen::Index j = 1; j <= n; ++j) csv += ",a" + std::to_string(j);
    csv += ",shift\n";
    for (Eigen::Index i = 0; i < n; ++i) {
      csv += std::to_string(i + 1);
      for (Eigen::Index j = 0; j < n; ++j) csv += "," + format_number(op.matrix(i, j));
      csv += "," + format_number(op.shift(i)) + "\n";
    }
    write_text(dir / "operator.csv", csv);
  }
  if (!options.quiet) {
    std::cout << "operators: definiteness = " << definiteness_name(spectral.definiteness)
              << ", lambda_min = " << format_number(spectral.lambda_min)
              << ", lambda_max = " << format_number(spectral.lambda_max) << "\n";
  }
  return kExitOk;
}

int command_oracle(const RunConfig& config, const CommandOptions& options) {
  const Parameter& u = require_parameter(config, "oracle");
  if (!config.oracle) {
    throw ConfigError("/oracle: required by the oracle command");
  }
  const auto dir = prepare_out_dir(config, options);

  const ActionContext base = make_action_context(config.problem);
  const OrientedContext oriented = orient_for_minimization(base, u);
  const auto [x_grid, value_grid] = brute_force_oracle(
      oriented.context, u, config.oracle->box_halfwidth, config.oracle->steps_per_axis);

  if (config.write_json) {
    ordered_json j;
    j["command"] = "oracle";
    j["orientation"] = orientation_name(oriented.context.orientation);
    j["box_halfwidth"] = config.oracle->box_halfwidth;
    j["steps_per_axis"] = config.oracle->steps_per_axis;
    j["x_grid_min"] = vector_json(x_grid);
    j["J_grid_min"] = value_grid;
    write_json_report(dir / "oracle_report.json", j);
  }
  if (!options.quiet) {
    std::cout << "oracle: J_grid_min = " << format_number(value_grid) << "\n";
  }
  return kExitOk;
}

int command_growth(const RunConfig& config, const CommandOptions& options) {
  const auto dir = prepare_out_dir(config, options);
  double bound = config.parameter_bound;
  if (!(bound > 0.0)) {
    throw ConfigError("/parameter: the growth command needs the ball radius M "
                      "(provide a parameter or sequence section)");
  }
  const GrowthVerdict verdict = growth_verdict(config.problem, bound);

  if (config.write_json) {
    ordered_json j;
    j["command"] = "growth";
    j["class"] = verdict_name(verdict.verdict);
    j["boundary"] = is_periodic(config.problem) ? "periodic" : "mixed";
    j["r"] = verdict.r;
    j["epsilon1"] = verdict.epsilon1;
    j["epsilon2"] = verdict.epsilon2;
    j["B"] = verdict.B;
    j["margin"] = verdict.margin;
    j["window_upper"] = verdict.window_upper ? ordered_json(*verdict.window_upper) : ordered_json(nullptr);
    j["window_upper_corrected"] =
        verdict.window_upper_corrected ? ordered_json(*verdict.window_upper_corrected) : ordered_json(nullptr);
    j["margin_corrected"] =
        verdict.margin_corrected ? ordered_json(*verdict.margin_corrected) : ordered_json(nullptr);
    j["definiteness"] = definiteness_name(verdict.definiteness);
    write_json_report(dir / "growth_report.json", j);
  }
  if (!options.quiet) {
    std::cout << "growth: class = " << verdict_name(verdict.verdict) << "\n";
  }
  return kExitOk;
}

int run_command(const std::string& command, const std::string& config_path,
                const std::optional<std::string>& out_dir,
                const std::optional<std::uint64_t>& seed, bool quiet) {
  try {
    std::ifstream file(config_path, std::ios::binary);
    if (!file) {
      throw ConfigError("cannot read config file " + config_path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    RunConfig config = parse_config_text(buffer.str());
    if (seed) config.solver.seed = *seed;

    CommandOptions options;
    options.out_dir = out_dir ? std::filesystem::path(*out_dir) : std::filesystem::path();
    options.quiet = quiet;

    if (command == "solve") return command_solve(config, options);
    if (command == "study") return command_study(config, options);
    if (command == "verify") return command_verify(config, options);
    if (command == "operators") return command_operators(config, options);
    if (command == "oracle") return command_oracle(config, options);
    if (command == "growth") return command_growth(config, options);
    std::cerr << "unknown command: " << command << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation fault: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace emden::cli

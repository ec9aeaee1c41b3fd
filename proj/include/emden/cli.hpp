#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emden/dependence.hpp"

namespace emden::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitCertification = 4;

/// Configuration problem: parse error or invariant violation. The message is
/// path-qualified; the command maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SequenceSpec {
  std::string kind;  // "affine" or "explicit"
  std::vector<double> limit;
  std::vector<double> direction;
  std::vector<std::vector<double>> items;
  int count = 0;
  double bound = 0.0;
};

struct OracleSpec {
  double box_halfwidth = 2.0;
  int steps_per_axis = 81;
};

struct VerifySpec {
  std::optional<std::vector<double>> x;
  std::optional<std::string> solution_csv;
};

struct RunConfig {
  ProblemInstance problem;
  double parameter_bound = 0.0;  // M from the parameter or sequence section
  std::optional<Parameter> parameter;
  std::optional<SequenceSpec> sequence;
  std::optional<OracleSpec> oracle;
  std::optional<VerifySpec> verify;
  SolveConfig solver;
  std::string out_dir = "out";
  bool write_json = true;
  bool write_csv = true;
};

/// Parses and validates a config document. Unknown keys are rejected with
/// path-qualified messages; invariant violations carry the invariant name.
RunConfig parse_config(const nlohmann::json& doc);

/// Parses config text, reporting parse errors with line and column.
RunConfig parse_config_text(const std::string& text);

/// Canonical form of a parsed config: defaults materialized, fixed key
/// order. parse_config(canonical_config(c)) reproduces c.
nlohmann::ordered_json canonical_config(const RunConfig& config);

struct CommandOptions {
  std::filesystem::path out_dir;
  bool quiet = false;
};

int command_solve(const RunConfig& config, const CommandOptions& options);
int command_study(const RunConfig& config, const CommandOptions& options);
int command_verify(const RunConfig& config, const CommandOptions& options);
int command_operators(const RunConfig& config, const CommandOptions& options);
int command_oracle(const RunConfig& config, const CommandOptions& options);
int command_growth(const RunConfig& config, const CommandOptions& options);

/// Shared entry point: reads the config file, applies overrides, dispatches
/// on the command name, and maps faults to exit codes.
int run_command(const std::string& command, const std::string& config_path,
                const std::optional<std::string>& out_dir,
                const std::optional<std::uint64_t>& seed, bool quiet);

/// Formats a double with 17 significant digits (CSV cells).
std::string format_number(double value);

}  // namespace emden::cli

#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "emden/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Variational solver for discrete Emden-Fowler boundary value problems"};
  app.require_subcommand(1);

  struct {
    std::string config;
    std::string out;
    std::int64_t seed = -1;
    bool seed_set = false;
    bool quiet = false;
  } args;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "Minimize the action functional and write the solution"},
      {"study", "Run a dependence-on-parameters study along a sequence"},
      {"verify", "Certify a candidate solution"},
      {"operators", "Assemble the quadratic operator and report its spectrum"},
      {"oracle", "Exhaustive grid search cross-check"},
      {"growth", "Classify the growth of the nonlinearity"},
  };

  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", args.config, "Path to the JSON config")->required();
    sub->add_option("--out", args.out, "Output directory (overrides the config)");
    sub->add_option("--seed", args.seed, "Seed override")->each([&args](const std::string&) {
      args.seed_set = true;
    });
    sub->add_flag("--quiet", args.quiet, "Suppress the console summary");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<std::string> out;
  if (!args.out.empty()) out = args.out;
  std::optional<std::uint64_t> seed;
  if (args.seed_set) seed = static_cast<std::uint64_t>(args.seed);
  return emden::cli::run_command(command, args.config, out, seed, args.quiet);
}

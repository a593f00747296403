// Command-line front end: one subcommand per experiment type.
//
//   chemostat lambda --config configs/example3.json [--seed N] [--output DIR]
//
// Worker count for replica-parallel runs comes from CHEMOSTAT_WORKERS.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemostat/config.hpp"
#include "chemostat/run.hpp"

namespace {

int report(const chemostat::Error& e) {
  nlohmann::ordered_json record;
  record["error"] = std::string(chemostat::to_string(e.code()));
  record["message"] = e.what();
  record["exit_code"] = chemostat::exit_code_for(e);
  std::cerr << record.dump() << '\n';
  return chemostat::exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime-switching stochastic chemostat: simulation, persistence threshold and wash-out analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;

  const char* commands[][2] = {
      {"simulate", "Integrate one sample path and write trajectory.csv"},
      {"lambda", "Estimate the persistence threshold and write lambda.csv"},
      {"washout", "Solve lambda(theta) = 0 by bisection and write washout.csv"},
      {"sweep", "Tabulate lambda and ES* over a theta grid into sweep.csv"},
      {"density", "Occupation histogram per regime into density.csv"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Path to the JSON run configuration")->required();
    sub->add_option("--seed", seed, "Override the master seed");
    sub->add_option("--output", output, "Override the output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : chemostat::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  chemostat::RunConfig config;
  try {
    config = chemostat::load_config(config_path);
    if (config.experiment_name() != command) {
      throw chemostat::Error(chemostat::ErrorCode::SchemaError,
                             "config describes experiment \"" + std::string(config.experiment_name()) +
                                 "\" but subcommand is \"" + command + "\"");
    }
  } catch (const chemostat::Error& e) {
    return report(e);
  }
  if (seed) config.seed = *seed;
  if (output) config.output_dir = *output;
  return chemostat::run(config, std::cout, std::cerr);
}

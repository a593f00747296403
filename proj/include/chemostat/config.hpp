#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chemostat/analysis.hpp"
#include "chemostat/engine.hpp"
#include "chemostat/model.hpp"

namespace chemostat {

// Ensemble block as it appears in configuration files.
struct EnsembleBlock {
  double burn_in = 200.0;
  double horizon = 2000.0;
  std::size_t replicas = 16;
  std::size_t batches = kDefaultBatches;

  bool operator==(const EnsembleBlock&) const = default;
  MonteCarloSettings to_settings(const IntegratorConfig& integrator) const;
};

struct SimulateSettings {
  double horizon = 500.0;
  SystemState initial;  // regime is 0-based in memory

  bool operator==(const SimulateSettings&) const = default;
};

enum class LambdaChoice { ClosedForm, MonteCarlo, Both };

struct LambdaSettings {
  LambdaChoice method = LambdaChoice::ClosedForm;
  EnsembleBlock mc;

  bool operator==(const LambdaSettings&) const = default;
};

struct WashoutSettings {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double tol = 1e-8;
  LambdaMethod method = LambdaMethod::ClosedFormQuadrature;
  EnsembleBlock mc;

  bool operator==(const WashoutSettings&) const = default;
};

struct SweepSettings {
  std::vector<double> thetas;
  LambdaMethod method = LambdaMethod::ClosedFormQuadrature;
  EnsembleBlock lambda_mc;
  EnsembleBlock es_star;
  double x0 = 1.0;

  bool operator==(const SweepSettings&) const = default;
};

struct DensitySettings {
  double horizon = 2000.0;
  double burn_in = 200.0;
  std::size_t replicas = 4;
  BinSpec bins;
  SystemState initial;

  bool operator==(const DensitySettings&) const = default;
};

using ExperimentSettings = std::variant<SimulateSettings, LambdaSettings, WashoutSettings, SweepSettings, DensitySettings>;

struct RunConfig {
  ChemostatModel model;
  IntegratorConfig integrator;
  ExperimentSettings experiment;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  std::string_view experiment_name() const;
  bool operator==(const RunConfig&) const = default;
};

// Parses and validates a JSON configuration. Unknown keys are rejected.
// Throws SyntaxError (with line and column), SchemaError (naming the key) or
// the model validation error.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Canonical JSON text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

std::string_view experiment_name(const ExperimentSettings& settings);

}  // namespace chemostat

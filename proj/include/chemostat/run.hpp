#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chemostat/config.hpp"

namespace chemostat {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

int exit_code_for(const Error& e);

struct RunResult {
  std::vector<std::filesystem::path> files;  // CSV artifacts, manifest last
  std::vector<std::string> warnings;
  std::string summary;                       // human-readable, for stdout
};

// Runs the configured experiment and writes its CSV artifacts plus
// manifest.json into config.output_dir. Throws chemostat::Error.
RunResult execute(const RunConfig& config);

// execute() wrapped for process boundaries: prints the summary to out, and on
// failure a one-line JSON error record to err (also written to
// output_dir/error.json when possible). Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace chemostat

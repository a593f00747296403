#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemostat {

enum class ErrorCode {
  // model validation
  NonPositiveParameter,
  GeneratorRowSumNonzero,
  GeneratorNotIrreducible,
  DimensionMismatch,
  InvalidState,
  // integration
  InvalidIntegratorConfig,
  StepTooLargeForRates,
  NonFiniteState,
  // analysis
  RequiresSingleRegime,
  DegenerateNoise,
  QuadratureNonConvergence,
  NoSignChange,
  MCInconclusive,
  BiomassHitZero,
  HorizonTooShort,
  InvalidMomentExponent,
  EmptyAfterBurnIn,
  InvalidArgument,
  // configuration and I/O
  SyntaxError,
  SchemaError,
  IoError,
};

// Coarse grouping used for process exit codes.
enum class ErrorCategory { Config, Numerical, Io };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

private:
  ErrorCode code_;
};

struct Violation {
  ErrorCode code;
  std::string field;
  std::string message;
};

// Thrown by require_valid(); carries every violated invariant, not just the first.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
  std::vector<Violation> violations_;
};

}  // namespace chemostat

#include "chemostat/errors.hpp"

namespace chemostat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::GeneratorRowSumNonzero: return "GeneratorRowSumNonzero";
    case ErrorCode::GeneratorNotIrreducible: return "GeneratorNotIrreducible";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidIntegratorConfig: return "InvalidIntegratorConfig";
    case ErrorCode::StepTooLargeForRates: return "StepTooLargeForRates";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::RequiresSingleRegime: return "RequiresSingleRegime";
    case ErrorCode::DegenerateNoise: return "DegenerateNoise";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::MCInconclusive: return "MCInconclusive";
    case ErrorCode::BiomassHitZero: return "BiomassHitZero";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::InvalidMomentExponent: return "InvalidMomentExponent";
    case ErrorCode::EmptyAfterBurnIn: return "EmptyAfterBurnIn";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveParameter:
    case ErrorCode::GeneratorRowSumNonzero:
    case ErrorCode::GeneratorNotIrreducible:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidState:
    case ErrorCode::InvalidIntegratorConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidMomentExponent:
    case ErrorCode::RequiresSingleRegime:
    case ErrorCode::SyntaxError:
    case ErrorCode::SchemaError:
      return ErrorCategory::Config;
    case ErrorCode::IoError:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Numerical;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.code)) + " (" + v.field + "): " + v.message;
  }
  return out;
}

ErrorCode first_code(const std::vector<Violation>& violations) {
  return violations.empty() ? ErrorCode::InvalidArgument : violations.front().code;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(first_code(violations), summarize(violations)), violations_(std::move(violations)) {}

}  // namespace chemostat

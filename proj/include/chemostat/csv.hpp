#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chemostat/analysis.hpp"
#include "chemostat/engine.hpp"

namespace chemostat::csv {

// 17 significant digits, enough for an exact double round trip.
std::string format_number(double v);

void write_trajectory(std::ostream& out, const Trajectory& trajectory);
void write_lambda(std::ostream& out, std::span<const LambdaEstimate> rows);
void write_washout(std::ostream& out, const WashoutResult& result);
void write_sweep(std::ostream& out, std::span<const EffluentRow> rows);
void write_histogram(std::ostream& out, const RegimeHistogram& histogram);

inline constexpr const char* kTrajectoryHeader = "t,s,x,regime";
inline constexpr const char* kLambdaHeader = "method,value,std_error,burn_in,horizon,replicas";
inline constexpr const char* kWashoutHeader = "theta0,theta_lo,theta_hi,iterations,lambda_at_root,lambda_at_root_se,method";
inline constexpr const char* kSweepHeader = "theta,lambda,lambda_se,es_star,es_star_se";
inline constexpr const char* kHistogramHeader = "regime,s_lo,s_hi,x_lo,x_hi,mass";

std::string method_label(LambdaMethod method);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

// Plain comma-separated reader (no quoting; none of the emitted files need it).
Table read(std::istream& in);

// Inverse of write_trajectory; regimes converted back to 0-based.
std::vector<SystemState> read_trajectory(std::istream& in);

}  // namespace chemostat::csv

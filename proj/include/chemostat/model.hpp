#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "chemostat/errors.hpp"

namespace chemostat {

// Coefficients that depend on the environmental regime.
struct RegimeParams {
  double k_m = 0.0;     // max growth constant, 1/day
  double k_d = 0.0;     // death rate, 1/day
  double Y = 0.0;       // yield ratio
  double sigma1 = 0.0;  // white-noise intensity on S, 1/sqrt(day)
  double sigma2 = 0.0;  // white-noise intensity on X, 1/sqrt(day)

  bool operator==(const RegimeParams&) const = default;
};

// Off-diagonal switching rate i -> j evaluated at the current (s, x).
using RateFunction = std::function<double(std::size_t i, std::size_t j, double s, double x)>;

// Generator of the regime chain. Either a constant matrix or a state-dependent
// rate callback. The diagonal is never trusted from the user in the
// state-dependent case: rows are rebuilt from the off-diagonal rates.
//
// Irreducibility can only be checked for constant generators; a state-dependent
// generator is assumed irreducible at every (s, x).
class SwitchingGenerator {
public:
  // 1x1 zero generator: a single regime without switching.
  SwitchingGenerator();
  explicit SwitchingGenerator(std::vector<std::vector<double>> matrix);
  SwitchingGenerator(std::size_t dimension, RateFunction rate);

  static SwitchingGenerator single_regime() { return SwitchingGenerator(); }

  std::size_t dimension() const noexcept { return dimension_; }
  bool is_constant() const noexcept { return !rate_; }

  // Constant mode only; empty for state-dependent generators.
  const std::vector<std::vector<double>>& matrix() const noexcept { return matrix_; }

  // Off-diagonal rate q_ij(s, x). Throws InvalidArgument on a negative rate.
  double rate(std::size_t i, std::size_t j, double s, double x) const;

  // Total exit rate sum_{j != i} q_ij(s, x).
  double exit_rate(std::size_t i, double s, double x) const;

  // Upper bound on exit rates over all regimes (constant mode only, 0 otherwise).
  double max_exit_rate() const;

  // Stationary distribution nu with nu Q = 0 (constant mode only).
  std::vector<double> stationary_distribution() const;

  bool operator==(const SwitchingGenerator& other) const;

private:
  std::size_t dimension_ = 1;
  std::vector<std::vector<double>> matrix_;
  RateFunction rate_;
};

struct ChemostatModel {
  double S0 = 0.0;     // input substrate concentration, mg/L
  double theta = 0.0;  // hydraulic residence time, day
  double K_S = 0.0;    // half-saturation constant, mg/L
  double R = 0.0;      // recycle ratio
  std::vector<RegimeParams> regimes;
  SwitchingGenerator generator;
  // Permits sigma1 == 0 (noise-free substrate). Off by default.
  bool allow_degenerate_noise = false;

  std::size_t regime_count() const noexcept { return regimes.size(); }
  ChemostatModel with_theta(double new_theta) const;

  bool operator==(const ChemostatModel&) const = default;
};

struct SystemState {
  double t = 0.0;
  double s = 0.0;
  double x = 0.0;
  std::size_t regime = 0;

  bool operator==(const SystemState&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ErrorCode code) const;
};

ValidationReport validate(const ChemostatModel& model);
void require_valid(const ChemostatModel& model);
void require_valid_state(const ChemostatModel& model, const SystemState& state);

struct Vec2 {
  double s = 0.0;
  double x = 0.0;
};

Vec2 drift(const ChemostatModel& model, const SystemState& state);
Vec2 diffusion(const ChemostatModel& model, const SystemState& state);

// Per-capita growth rate of X in log coordinates on the boundary x = 0.
// Its stationary average along the boundary process is the threshold lambda.
double lambda_integrand(const ChemostatModel& model, double s, std::size_t regime);

// Largest admissible moment exponent increment; +inf when some sigma2 is zero.
double pstar_bound(const ChemostatModel& model);

// max_i Y(i)
double max_yield(const ChemostatModel& model);

namespace presets {

// Two-regime switching model (sigma2 of regime 1 read positionally as 0.2).
ChemostatModel example1();
// Single regime, theta = 1: extinction.
ChemostatModel example2();
// Single regime, theta = 5: persistence.
ChemostatModel example3();

}  // namespace presets

}  // namespace chemostat

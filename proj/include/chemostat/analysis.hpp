#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "chemostat/engine.hpp"
#include "chemostat/model.hpp"
#include "chemostat/parallel.hpp"
#include "chemostat/rng.hpp"
#include "chemostat/stats.hpp"

namespace chemostat {

enum class LambdaMethod { ErgodicMC, ClosedFormQuadrature };

struct LambdaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  LambdaMethod method = LambdaMethod::ClosedFormQuadrature;
  double burn_in = 0.0;
  double horizon = 0.0;
  std::size_t replicas = 0;
};

// Ensemble settings shared by every time-averaging estimator.
struct MonteCarloSettings {
  IntegratorConfig integrator{.dt = kLambdaDt};
  double burn_in = 200.0;
  double horizon = 2000.0;
  std::size_t replicas = 16;
  std::size_t batches = kDefaultBatches;
  Execution execution = Execution::Parallel;

  bool operator==(const MonteCarloSettings&) const = default;
};

// Shape a and scale b of the stationary law of the boundary substrate
// without switching; density b^a / Gamma(a) * s^(-a-1) * exp(-b/s).
struct InverseGammaParams {
  double a = 0.0;
  double b = 0.0;

  double mean() const { return b / (a - 1.0); }
};

InverseGammaParams inverse_gamma_params(const ChemostatModel& model);

inline constexpr double kQuadratureRelTol = 1e-8;

// Lambda for a single-regime model by quadrature against the inverse-gamma
// stationary density. After u = b/s the weight is a Gamma(a, 1) density and
// the Monod factor k_m Y b / (K_S u + b) is bounded. The Gauss-Kronrod rule
// runs in v = ln u over the [1e-12, 1 - 1e-12] quantile range, which keeps
// the u^(a-1) endpoint behaviour smooth when a is near 1. std_error holds
// the quadrature error estimate plus the truncated tail mass bound.
// Does not validate the model (k_m = 0 is a legal probe here).
LambdaEstimate lambda_closed_form(const ChemostatModel& model, double rel_tol = kQuadratureRelTol);

struct BoundaryAverages {
  LambdaEstimate lambda;
  Estimate mean_substrate;  // time average of the boundary substrate
};

// Ergodic averages along the boundary process, started at s = S0 and regime
// r mod m0 for replica r. Reductions run in replica order.
BoundaryAverages estimate_boundary_averages(const ChemostatModel& model, const MonteCarloSettings& settings,
                                            const StreamFamily& streams);

LambdaEstimate estimate_lambda_mc(const ChemostatModel& model, const MonteCarloSettings& settings,
                                  const StreamFamily& streams);

struct LambdaMethodSpec {
  LambdaMethod method = LambdaMethod::ClosedFormQuadrature;
  MonteCarloSettings mc;  // used by ErgodicMC only

  bool operator==(const LambdaMethodSpec&) const = default;
};

LambdaEstimate estimate_lambda(const ChemostatModel& model, const LambdaMethodSpec& spec,
                               const StreamFamily& streams);

struct WashoutResult {
  double theta0 = 0.0;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  std::size_t iterations = 0;
  double lambda_at_root = 0.0;  // |lambda(theta0)|
  double lambda_at_root_se = 0.0;
  LambdaMethod method = LambdaMethod::ClosedFormQuadrature;
};

inline constexpr std::size_t kMaxBisectionClosedForm = 60;
inline constexpr std::size_t kMaxBisectionMonteCarlo = 25;
inline constexpr double kSignConfidence = 3.0;

// Bisection on theta for lambda(theta) = 0. Under ErgodicMC every sign test
// uses its own sub-family of streams and must be decisive at 3 sigma;
// otherwise MCInconclusive is thrown and the caller has to enlarge the
// ensemble.
WashoutResult washout_time(const ChemostatModel& model, double theta_lo, double theta_hi, double tol,
                           const LambdaMethodSpec& spec, const StreamFamily& streams);

struct StationarySummary {
  Estimate mean_S;
  Estimate mean_X;
  std::vector<double> regime_occupancy;
  Estimate moment_1p;  // E[(max_i Y(i) * S + X)^(1+p)]
  double p = 0.0;
};

// Long-run averages of the full system started at (S0, x0, r mod m0).
StationarySummary stationary_summary(const ChemostatModel& model, const MonteCarloSettings& settings, double p,
                                     const StreamFamily& streams, double x0 = 1.0);

struct EffluentSettings {
  LambdaMethodSpec lambda;
  MonteCarloSettings es_star;
  double x0 = 1.0;

  bool operator==(const EffluentSettings&) const = default;
};

struct EffluentRow {
  double theta = 0.0;
  double lambda = 0.0;
  double lambda_se = 0.0;
  double es_star = 0.0;
  double es_star_se = 0.0;
};

std::vector<EffluentRow> effluent_curve(const ChemostatModel& model, std::span<const double> theta_grid,
                                        const EffluentSettings& settings, const StreamFamily& streams);

struct SlopeEstimate {
  double slope = 0.0;
  double std_error = 0.0;
};

// Least-squares slope of ln X(t) over the second half of the trajectory.
// The error treats ln X as drifted Brownian motion on that window:
// Var(OLS slope) = 6 v / (5 L), with v the per-day quadratic variation.
SlopeEstimate extinction_rate(const Trajectory& trajectory);

struct BinSpec {
  std::size_t s_bins = 50;
  std::size_t x_bins = 50;
  std::optional<std::pair<double, double>> s_range;  // defaults to the sample range
  std::optional<std::pair<double, double>> x_range;

  bool operator==(const BinSpec&) const = default;
};

// Occupation masses per regime over an (S, X) grid; samples outside an
// explicit range are clamped into the edge bins.
struct RegimeHistogram {
  std::size_t regimes = 0;
  std::vector<double> s_edges;
  std::vector<double> x_edges;
  std::vector<double> masses;  // [regime][s_bin][x_bin], row-major
  double burn_in = 0.0;
  double total_weight = 0.0;

  std::size_t s_bins() const { return s_edges.size() - 1; }
  std::size_t x_bins() const { return x_edges.size() - 1; }
  double mass(std::size_t regime, std::size_t s_bin, std::size_t x_bin) const;
  double regime_mass(std::size_t regime) const;
  double total_mass() const;
};

RegimeHistogram empirical_density(std::span<const Trajectory> trajectories, const BinSpec& bins, double burn_in);

// Independent full-system trajectories for replicas r = 0..n-1 started at
// init (regime overridden to r mod m0 when spread_regimes is set).
std::vector<Trajectory> simulate_ensemble(const ChemostatModel& model, const SystemState& init, double horizon,
                                          const IntegratorConfig& config, std::size_t replicas,
                                          const StreamFamily& streams, Execution exec = Execution::Parallel,
                                          bool spread_regimes = false);

}  // namespace chemostat

#include "chemostat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace chemostat {

namespace {

void require_single_regime(const ChemostatModel& model) {
  if (model.regime_count() != 1 || model.generator.dimension() != 1) {
    throw Error(ErrorCode::RequiresSingleRegime, "closed form needs exactly one regime");
  }
}

void check_settings(const MonteCarloSettings& s) {
  if (!(s.burn_in >= 0.0)) throw Error(ErrorCode::InvalidArgument, "burn_in must be nonnegative");
  if (!(s.horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  if (s.replicas < 1) throw Error(ErrorCode::InvalidArgument, "replicas must be at least 1");
  if (s.batches < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 batches per replica");
}

double constant_terms(const ChemostatModel& model, const RegimeParams& r) {
  return r.k_d + (1.0 + model.R) / model.theta + 0.5 * r.sigma2 * r.sigma2;
}

// Discards the burn-in window and returns the state at its end.
SystemState burn(const ChemostatModel& model, const SystemState& init, const MonteCarloSettings& s,
                 RngStream& rng) {
  if (s.burn_in <= 0.0) return init;
  return integrate(model, init, s.burn_in, s.integrator, rng, [](std::size_t, const SystemState&) {});
}

}  // namespace

InverseGammaParams inverse_gamma_params(const ChemostatModel& model) {
  require_single_regime(model);
  const double sigma1 = model.regimes[0].sigma1;
  if (!(sigma1 > 0.0)) throw Error(ErrorCode::DegenerateNoise, "sigma1 must be positive");
  const double scale = model.theta * sigma1 * sigma1;
  return {(2.0 + scale) / scale, 2.0 * model.S0 / scale};
}

LambdaEstimate lambda_closed_form(const ChemostatModel& model, double rel_tol) {
  const InverseGammaParams ig = inverse_gamma_params(model);
  const auto& r = model.regimes[0];
  const double growth = r.k_m * r.Y;

  constexpr double tail = 1e-12;
  const double lo = std::log(boost::math::gamma_p_inv(ig.a, tail));
  const double hi = std::log(boost::math::gamma_q_inv(ig.a, tail));
  const double log_norm = boost::math::lgamma(ig.a);
  // In v = ln u the Gamma(a) weight u^(a-1) e^(-u) du becomes the smooth
  // bell exp(a v - e^v) dv, even when a is close to 1.
  auto integrand = [&](double v) {
    const double u = std::exp(v);
    return growth * ig.b / (model.K_S * u + ig.b) * std::exp(ig.a * v - u - log_norm);
  };

  double error = 0.0;
  double l1 = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, hi, 20, rel_tol * 0.1, &error, &l1);
  const double tail_bound = 2.0 * tail * growth;
  if (!std::isfinite(integral) || error > rel_tol * std::max(std::abs(integral), 1e-300) + 1e-300) {
    std::ostringstream msg;
    msg << "error estimate " << error << " exceeds relative tolerance " << rel_tol;
    throw Error(ErrorCode::QuadratureNonConvergence, msg.str());
  }

  LambdaEstimate est;
  est.value = integral - constant_terms(model, r);
  est.std_error = error + tail_bound;
  est.method = LambdaMethod::ClosedFormQuadrature;
  return est;
}

BoundaryAverages estimate_boundary_averages(const ChemostatModel& model, const MonteCarloSettings& settings,
                                            const StreamFamily& streams) {
  check_settings(settings);
  require_valid(model);
  (void)check_integrator(settings.integrator, model);
  const std::size_t n = step_count(settings.horizon, settings.integrator.dt);
  const std::size_t m = model.regime_count();

  struct ReplicaSums {
    BatchMeans lambda;
    BatchMeans substrate;
  };
  auto kernel = [&](std::size_t r) {
    RngStream rng = streams.replica(r);
    SystemState state{0.0, model.S0, 0.0, r % m};
    state = burn(model, state, settings, rng);
    ReplicaSums sums{BatchMeans(n, settings.batches), BatchMeans(n, settings.batches)};
    integrate(model, state, settings.horizon, settings.integrator, rng, [&](std::size_t, const SystemState& s) {
      sums.lambda.add(lambda_integrand(model, s.s, s.regime));
      sums.substrate.add(s.s);
    });
    return sums;
  };
  const auto replicas = run_replicas(settings.replicas, settings.execution, kernel);

  std::vector<BatchMeans> lambda_parts;
  std::vector<BatchMeans> substrate_parts;
  for (const auto& r : replicas) {
    lambda_parts.push_back(r.lambda);
    substrate_parts.push_back(r.substrate);
  }
  const Estimate lam = pool_batch_means(lambda_parts);

  BoundaryAverages out;
  out.lambda.value = lam.value;
  out.lambda.std_error = lam.std_error;
  out.lambda.method = LambdaMethod::ErgodicMC;
  out.lambda.burn_in = settings.burn_in;
  out.lambda.horizon = settings.horizon;
  out.lambda.replicas = settings.replicas;
  out.mean_substrate = pool_batch_means(substrate_parts);
  return out;
}

LambdaEstimate estimate_lambda_mc(const ChemostatModel& model, const MonteCarloSettings& settings,
                                  const StreamFamily& streams) {
  return estimate_boundary_averages(model, settings, streams).lambda;
}

LambdaEstimate estimate_lambda(const ChemostatModel& model, const LambdaMethodSpec& spec,
                               const StreamFamily& streams) {
  if (spec.method == LambdaMethod::ClosedFormQuadrature) return lambda_closed_form(model);
  return estimate_lambda_mc(model, spec.mc, streams);
}

WashoutResult washout_time(const ChemostatModel& model, double theta_lo, double theta_hi, double tol,
                           const LambdaMethodSpec& spec, const StreamFamily& streams) {
  if (!(theta_lo > 0.0) || !(theta_hi > theta_lo)) {
    throw Error(ErrorCode::InvalidArgument, "bracket must satisfy 0 < theta_lo < theta_hi");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  const bool mc = spec.method == LambdaMethod::ErgodicMC;
  const std::size_t cap = mc ? kMaxBisectionMonteCarlo : kMaxBisectionClosedForm;

  std::size_t evaluations = 0;
  auto evaluate = [&](double theta) { return estimate_lambda(model.with_theta(theta), spec, streams.sub(evaluations++)); };
  // -1, 0 (exact root, closed form only) or +1.
  auto sign_of = [&](const LambdaEstimate& e, double theta) {
    if (mc && std::abs(e.value) < kSignConfidence * e.std_error) {
      std::ostringstream msg;
      msg << "lambda(" << theta << ") = " << e.value << " +/- " << e.std_error
          << " is not decisive at 3 sigma; increase horizon or replicas";
      throw Error(ErrorCode::MCInconclusive, msg.str());
    }
    return e.value < 0.0 ? -1 : (e.value > 0.0 ? 1 : 0);
  };

  const int s_lo = sign_of(evaluate(theta_lo), theta_lo);
  const int s_hi = sign_of(evaluate(theta_hi), theta_hi);
  if (!(s_lo < 0 && s_hi > 0)) {
    std::ostringstream msg;
    msg << "lambda must be negative at theta_lo = " << theta_lo << " and positive at theta_hi = " << theta_hi;
    throw Error(ErrorCode::NoSignChange, msg.str());
  }

  WashoutResult result;
  result.method = spec.method;
  double lo = theta_lo;
  double hi = theta_hi;
  while (hi - lo >= tol && result.iterations < cap) {
    const double mid = 0.5 * (lo + hi);
    const int s = sign_of(evaluate(mid), mid);
    ++result.iterations;
    if (s == 0) {
      lo = hi = mid;
      break;
    }
    (s < 0 ? lo : hi) = mid;
  }
  result.theta_lo = lo;
  result.theta_hi = hi;
  result.theta0 = 0.5 * (lo + hi);
  const LambdaEstimate at_root = evaluate(result.theta0);
  result.lambda_at_root = std::abs(at_root.value);
  result.lambda_at_root_se = at_root.std_error;
  return result;
}

StationarySummary stationary_summary(const ChemostatModel& model, const MonteCarloSettings& settings, double p,
                                     const StreamFamily& streams, double x0) {
  check_settings(settings);
  require_valid(model);
  const double pstar = pstar_bound(model);
  if (!(p > 0.0) || !(p < pstar)) {
    std::ostringstream msg;
    msg << "moment exponent increment p = " << p << " must lie in (0, " << pstar << ")";
    throw Error(ErrorCode::InvalidMomentExponent, msg.str());
  }
  if (!(x0 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x0 must be nonnegative");
  (void)check_integrator(settings.integrator, model);

  const std::size_t n = step_count(settings.horizon, settings.integrator.dt);
  const std::size_t m = model.regime_count();
  const double y_hat = max_yield(model);

  struct ReplicaSums {
    BatchMeans s;
    BatchMeans x;
    BatchMeans moment;
    std::vector<std::size_t> occupancy;
  };
  auto kernel = [&](std::size_t r) {
    RngStream rng = streams.replica(r);
    SystemState state{0.0, model.S0, x0, r % m};
    state = burn(model, state, settings, rng);
    ReplicaSums sums{BatchMeans(n, settings.batches), BatchMeans(n, settings.batches),
                     BatchMeans(n, settings.batches), std::vector<std::size_t>(m, 0)};
    integrate(model, state, settings.horizon, settings.integrator, rng, [&](std::size_t, const SystemState& st) {
      sums.s.add(st.s);
      sums.x.add(st.x);
      sums.moment.add(std::pow(y_hat * st.s + st.x, 1.0 + p));
      ++sums.occupancy[st.regime];
    });
    return sums;
  };
  const auto replicas = run_replicas(settings.replicas, settings.execution, kernel);

  std::vector<BatchMeans> s_parts;
  std::vector<BatchMeans> x_parts;
  std::vector<BatchMeans> moment_parts;
  std::vector<std::size_t> occupancy(m, 0);
  for (const auto& r : replicas) {
    s_parts.push_back(r.s);
    x_parts.push_back(r.x);
    moment_parts.push_back(r.moment);
    for (std::size_t i = 0; i < m; ++i) occupancy[i] += r.occupancy[i];
  }

  StationarySummary out;
  out.mean_S = pool_batch_means(s_parts);
  out.mean_X = pool_batch_means(x_parts);
  out.moment_1p = pool_batch_means(moment_parts);
  out.p = p;
  const double total = static_cast<double>(n) * static_cast<double>(settings.replicas);
  for (std::size_t c : occupancy) out.regime_occupancy.push_back(static_cast<double>(c) / total);
  return out;
}

std::vector<EffluentRow> effluent_curve(const ChemostatModel& model, std::span<const double> theta_grid,
                                        const EffluentSettings& settings, const StreamFamily& streams) {
  for (std::size_t k = 0; k < theta_grid.size(); ++k) {
    if (!(theta_grid[k] > 0.0) || (k > 0 && !(theta_grid[k] > theta_grid[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "theta grid must be positive and strictly ascending");
    }
  }
  std::vector<EffluentRow> rows;
  rows.reserve(theta_grid.size());
  for (std::size_t k = 0; k < theta_grid.size(); ++k) {
    const ChemostatModel at = model.with_theta(theta_grid[k]);
    const StreamFamily family = streams.sub(2 * k);
    const LambdaEstimate lam = estimate_lambda(at, settings.lambda, family);

    // Only the S average is needed; p is any admissible exponent.
    const double p = std::min(0.5, 0.5 * pstar_bound(at));
    const StationarySummary summary = stationary_summary(at, settings.es_star, p, streams.sub(2 * k + 1), settings.x0);
    rows.push_back({theta_grid[k], lam.value, lam.std_error, summary.mean_S.value, summary.mean_S.std_error});
  }
  return rows;
}

SlopeEstimate extinction_rate(const Trajectory& trajectory) {
  const auto points = trajectory.with_terminal();
  for (const auto& p : points) {
    if (!(p.x > 0.0)) throw Error(ErrorCode::BiomassHitZero, "ln X is undefined once X reaches 0");
  }
  if (points.size() < 2) throw Error(ErrorCode::HorizonTooShort, "trajectory has fewer than two points");
  const double t_mid = 0.5 * (points.front().t + points.back().t);
  std::vector<double> t;
  std::vector<double> y;
  for (const auto& p : points) {
    if (p.t >= t_mid) {
      t.push_back(p.t);
      y.push_back(std::log(p.x));
    }
  }
  if (t.size() < 4) throw Error(ErrorCode::HorizonTooShort, "need at least 4 samples in the second half");

  const LineFit fit = least_squares(t, y);
  const double window = t.back() - t.front();
  double quadratic_variation = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double d = y[i] - y[i - 1];
    quadratic_variation += d * d;
  }
  const double v = quadratic_variation / window;
  return {fit.slope, std::sqrt(1.2 * v / window)};
}

double RegimeHistogram::mass(std::size_t regime, std::size_t s_bin, std::size_t x_bin) const {
  return masses[(regime * s_bins() + s_bin) * x_bins() + x_bin];
}

double RegimeHistogram::regime_mass(std::size_t regime) const {
  double total = 0.0;
  const std::size_t cells = s_bins() * x_bins();
  for (std::size_t c = 0; c < cells; ++c) total += masses[regime * cells + c];
  return total;
}

double RegimeHistogram::total_mass() const {
  double total = 0.0;
  for (double m : masses) total += m;
  return total;
}

namespace {

std::vector<double> linear_edges(double lo, double hi, std::size_t bins) {
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges[bins] = hi;
  return edges;
}

std::size_t bin_of(double v, double lo, double hi, std::size_t bins) {
  if (!(v > lo)) return 0;
  if (!(v < hi)) return bins - 1;
  const auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
  return std::min(idx, bins - 1);
}

}  // namespace

RegimeHistogram empirical_density(std::span<const Trajectory> trajectories, const BinSpec& bins, double burn_in) {
  if (bins.s_bins == 0 || bins.x_bins == 0) throw Error(ErrorCode::InvalidArgument, "bin counts must be positive");
  std::vector<const SystemState*> kept;
  std::size_t regimes = 1;
  for (const auto& traj : trajectories) {
    const double t_start = traj.samples.empty() ? 0.0 : traj.samples.front().t;
    for (const auto& s : traj.samples) {
      regimes = std::max(regimes, s.regime + 1);
      if (s.t - t_start >= burn_in) kept.push_back(&s);
    }
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyAfterBurnIn, "no samples after burn-in");

  auto range_of = [&](auto member, const std::optional<std::pair<double, double>>& fixed) {
    if (fixed) {
      if (!(fixed->second > fixed->first)) throw Error(ErrorCode::InvalidArgument, "bin range must be increasing");
      return *fixed;
    }
    double lo = kept.front()->*member;
    double hi = lo;
    for (const auto* s : kept) {
      lo = std::min(lo, s->*member);
      hi = std::max(hi, s->*member);
    }
    if (!(hi > lo)) hi = lo + std::max(1.0, std::abs(lo));
    return std::pair{lo, hi};
  };
  const auto [s_lo, s_hi] = range_of(&SystemState::s, bins.s_range);
  const auto [x_lo, x_hi] = range_of(&SystemState::x, bins.x_range);

  RegimeHistogram h;
  h.regimes = regimes;
  h.s_edges = linear_edges(s_lo, s_hi, bins.s_bins);
  h.x_edges = linear_edges(x_lo, x_hi, bins.x_bins);
  h.masses.assign(regimes * bins.s_bins * bins.x_bins, 0.0);
  h.burn_in = burn_in;
  h.total_weight = static_cast<double>(kept.size());
  std::vector<std::size_t> counts(h.masses.size(), 0);
  for (const auto* s : kept) {
    const std::size_t i = bin_of(s->s, s_lo, s_hi, bins.s_bins);
    const std::size_t j = bin_of(s->x, x_lo, x_hi, bins.x_bins);
    ++counts[(s->regime * bins.s_bins + i) * bins.x_bins + j];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    h.masses[c] = static_cast<double>(counts[c]) / h.total_weight;
  }
  return h;
}

std::vector<Trajectory> simulate_ensemble(const ChemostatModel& model, const SystemState& init, double horizon,
                                          const IntegratorConfig& config, std::size_t replicas,
                                          const StreamFamily& streams, Execution exec, bool spread_regimes) {
  return run_replicas(replicas, exec, [&](std::size_t r) {
    RngStream rng = streams.replica(r);
    SystemState start = init;
    if (spread_regimes) start.regime = r % model.regime_count();
    return simulate(model, start, horizon, config, rng);
  });
}

}  // namespace chemostat

#include "chemostat/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace chemostat {

std::vector<std::string> check_integrator(const IntegratorConfig& config, const ChemostatModel& model) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
    throw Error(ErrorCode::InvalidIntegratorConfig, "dt must be positive");
  }
  if (!(config.positivity_floor > 0.0)) {
    throw Error(ErrorCode::InvalidIntegratorConfig, "positivity_floor must be positive");
  }
  if (config.record_stride < 1) {
    throw Error(ErrorCode::InvalidIntegratorConfig, "record_stride must be at least 1");
  }
  std::vector<std::string> warnings;
  if (model.generator.is_constant()) {
    const double load = config.dt * model.generator.max_exit_rate();
    if (load >= 1.0) {
      std::ostringstream msg;
      msg << "dt * max switching rate = " << load << " >= 1";
      throw Error(ErrorCode::InvalidIntegratorConfig, msg.str());
    }
    if (load >= kSwitchRateWarning) {
      std::ostringstream msg;
      msg << "dt * max switching rate = " << load << " exceeds " << kSwitchRateWarning
          << "; switching discretization bias may be noticeable";
      warnings.push_back(msg.str());
    }
  }
  return warnings;
}

StepVariates draw_step_variates(RngStream& rng) {
  StepVariates v;
  v.u = rng.uniform();
  std::tie(v.z1, v.z2) = rng.normal_pair();
  return v;
}

std::size_t sample_switch(const ChemostatModel& model, const SystemState& state, double dt, double u) {
  const auto& gen = model.generator;
  const std::size_t i = state.regime;
  const std::size_t m = gen.dimension();
  if (m == 1) return i;

  const double exit = gen.exit_rate(i, state.s, state.x);
  if (!(dt * exit < 1.0)) {
    std::ostringstream msg;
    msg << "dt * exit rate = " << dt * exit << " from regime " << i + 1 << " must be below 1";
    throw Error(ErrorCode::StepTooLargeForRates, msg.str());
  }
  double edge = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (j == i) continue;
    edge += gen.rate(i, j, state.s, state.x) * dt;
    if (u < edge) return j;
  }
  return i;
}

std::size_t sample_switch(const ChemostatModel& model, const SystemState& state, double dt, RngStream& rng) {
  return sample_switch(model, state, dt, rng.uniform());
}

SystemState advance_continuous(const ChemostatModel& model, const SystemState& state, std::size_t regime,
                               double dt, double floor, double z1, double z2, bool* floor_hit) {
  const auto& r = model.regimes[regime];
  const double sqrt_dt = std::sqrt(dt);
  const double s = state.s;
  const double x = state.x;

  SystemState next;
  next.t = state.t + dt;
  next.regime = regime;

  if (x > 0.0) {
    const double log_x = std::log(x) + lambda_integrand(model, s, regime) * dt + r.sigma2 * sqrt_dt * z2;
    next.x = std::isfinite(log_x) ? std::exp(log_x) : std::numeric_limits<double>::quiet_NaN();
  } else {
    next.x = 0.0;
  }

  const double consumption = r.k_m * s * x / (model.K_S + s);
  const double candidate = s + ((model.S0 - s) / model.theta - consumption) * dt + r.sigma1 * s * sqrt_dt * z1;
  const bool hit = !(candidate >= floor);
  next.s = hit ? floor : candidate;
  if (floor_hit != nullptr) *floor_hit = hit;
  return next;
}

SystemState step(const ChemostatModel& model, const SystemState& state, double dt, double floor,
                 const StepVariates& v, bool* floor_hit) {
  const std::size_t regime = sample_switch(model, state, dt, v.u);
  SystemState next = advance_continuous(model, state, regime, dt, floor, v.z1, v.z2, floor_hit);
  if (!std::isfinite(next.s) || !std::isfinite(next.x)) {
    std::ostringstream msg;
    msg << "state became non-finite (s=" << next.s << ", x=" << next.x << "); reduce dt";
    throw Error(ErrorCode::NonFiniteState, msg.str());
  }
  return next;
}

SystemState step(const ChemostatModel& model, const SystemState& state, const IntegratorConfig& config,
                 RngStream& rng) {
  return step(model, state, config.dt, config.positivity_floor, draw_step_variates(rng));
}

std::size_t step_count(double horizon, double dt) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  const double ratio = horizon / dt;
  const double nearest = std::round(ratio);
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(ratio));
}

std::vector<SystemState> Trajectory::with_terminal() const {
  std::vector<SystemState> out = samples;
  if (out.empty() || terminal.t > out.back().t) out.push_back(terminal);
  return out;
}

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFFU;
      h *= 0x100000001b3ULL;
    }
  }
  void add(double d) { bytes(std::bit_cast<std::uint64_t>(d)); }
  void add(std::uint64_t v) { bytes(v); }
};

void validate_inputs(const ChemostatModel& model, const SystemState& init, const IntegratorConfig& config) {
  require_valid(model);
  require_valid_state(model, init);
  (void)check_integrator(config, model);
}

}  // namespace

std::uint64_t fingerprint(const ChemostatModel& model, const IntegratorConfig& config) {
  Fnv1a f;
  f.add(model.S0);
  f.add(model.theta);
  f.add(model.K_S);
  f.add(model.R);
  f.add(static_cast<std::uint64_t>(model.allow_degenerate_noise));
  f.add(static_cast<std::uint64_t>(model.regimes.size()));
  for (const auto& r : model.regimes) {
    f.add(r.k_m);
    f.add(r.k_d);
    f.add(r.Y);
    f.add(r.sigma1);
    f.add(r.sigma2);
  }
  f.add(static_cast<std::uint64_t>(model.generator.dimension()));
  if (model.generator.is_constant()) {
    for (const auto& row : model.generator.matrix()) {
      for (double q : row) f.add(q);
    }
  } else {
    f.add(std::uint64_t{0x5D});  // state-dependent marker
  }
  f.add(config.dt);
  f.add(config.positivity_floor);
  f.add(static_cast<std::uint64_t>(config.record_stride));
  f.add(static_cast<std::uint64_t>(config.scheme));
  return f.h;
}

Trajectory simulate(const ChemostatModel& model, const SystemState& init, double horizon,
                    const IntegratorConfig& config, RngStream& rng) {
  validate_inputs(model, init, config);
  Trajectory traj;
  traj.model_fingerprint = fingerprint(model, config);
  const std::size_t n = step_count(horizon, config.dt);
  traj.samples.reserve(n / config.record_stride + 2);
  traj.samples.push_back(init);
  traj.terminal = integrate(
      model, init, horizon, config, rng,
      [&](std::size_t k, const SystemState& s) {
        if (k < n && k % config.record_stride == 0) traj.samples.push_back(s);
      },
      &traj.floor_hits);
  return traj;
}

Trajectory simulate_boundary(const ChemostatModel& model, double s0, std::size_t regime0, double horizon,
                             const IntegratorConfig& config, RngStream& rng) {
  return simulate(model, SystemState{0.0, s0, 0.0, regime0}, horizon, config, rng);
}

std::pair<Trajectory, Trajectory> simulate_coupled_pair(const ChemostatModel& model, const SystemState& init,
                                                        double horizon, const IntegratorConfig& config,
                                                        RngStream& rng) {
  validate_inputs(model, init, config);
  const std::size_t n = step_count(horizon, config.dt);
  Trajectory full;
  Trajectory boundary;
  full.model_fingerprint = boundary.model_fingerprint = fingerprint(model, config);
  SystemState a = init;
  SystemState b = init;
  b.x = 0.0;
  full.samples.push_back(a);
  boundary.samples.push_back(b);

  for (std::size_t k = 1; k <= n; ++k) {
    const double t_next = (k == n) ? init.t + horizon : init.t + static_cast<double>(k) * config.dt;
    const double h = t_next - a.t;
    const StepVariates v = draw_step_variates(rng);
    bool hit_a = false;
    bool hit_b = false;
    try {
      a = step(model, a, h, config.positivity_floor, v, &hit_a);
      b = advance_continuous(model, b, a.regime, h, config.positivity_floor, v.z1, v.z2, &hit_b);
      if (!std::isfinite(b.s)) throw Error(ErrorCode::NonFiniteState, "boundary state became non-finite");
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at step " + std::to_string(k));
    }
    a.t = b.t = t_next;
    full.floor_hits += hit_a ? 1 : 0;
    boundary.floor_hits += hit_b ? 1 : 0;
    if (k < n && k % config.record_stride == 0) {
      full.samples.push_back(a);
      boundary.samples.push_back(b);
    }
  }
  full.terminal = a;
  boundary.terminal = b;
  return {std::move(full), std::move(boundary)};
}

}  // namespace chemostat

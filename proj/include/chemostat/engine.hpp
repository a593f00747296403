#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chemostat/errors.hpp"
#include "chemostat/model.hpp"
#include "chemostat/rng.hpp"

namespace chemostat {

enum class Scheme { EulerMaruyamaLogX };

inline constexpr double kLambdaDt = 1e-3;
inline constexpr double kTrajectoryDt = 1e-2;

struct IntegratorConfig {
  double dt = kTrajectoryDt;
  double positivity_floor = 1e-12;
  std::size_t record_stride = 1;
  Scheme scheme = Scheme::EulerMaruyamaLogX;

  bool operator==(const IntegratorConfig&) const = default;
};

// dt * (max exit rate) above this is reported as a warning.
inline constexpr double kSwitchRateWarning = 0.1;

// Throws InvalidIntegratorConfig on hard violations (dt <= 0, floor <= 0,
// stride 0, dt * max exit rate >= 1 for constant generators) and returns
// soft warnings.
std::vector<std::string> check_integrator(const IntegratorConfig& config, const ChemostatModel& model);

// Random inputs of one step. Every step consumes exactly one uniform and one
// normal pair, whatever branch it takes, so coupled runs stay aligned.
struct StepVariates {
  double u = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
};

StepVariates draw_step_variates(RngStream& rng);

// Regime after one step of length dt, using the pre-step (s, x). Switches to
// j != i when u falls into the j-th slot of width q_ij * dt.
std::size_t sample_switch(const ChemostatModel& model, const SystemState& state, double dt, double u);
std::size_t sample_switch(const ChemostatModel& model, const SystemState& state, double dt, RngStream& rng);

// Continuous part of one step in a given regime. ln X takes an exact-in-form
// log step, S an Euler-Maruyama step projected onto [floor, inf). x == 0
// stays exactly 0.
SystemState advance_continuous(const ChemostatModel& model, const SystemState& state, std::size_t regime,
                               double dt, double floor, double z1, double z2, bool* floor_hit = nullptr);

// One full step: switching, then the continuous update. Throws NonFiniteState.
SystemState step(const ChemostatModel& model, const SystemState& state, double dt, double floor,
                 const StepVariates& v, bool* floor_hit = nullptr);
SystemState step(const ChemostatModel& model, const SystemState& state, const IntegratorConfig& config,
                 RngStream& rng);

// Number of steps covering [0, horizon]: ceil(horizon / dt), snapping ratios
// that are integral up to rounding.
std::size_t step_count(double horizon, double dt);

struct Trajectory {
  std::vector<SystemState> samples;
  std::uint64_t model_fingerprint = 0;
  SystemState terminal;
  std::size_t floor_hits = 0;

  // Recorded samples followed by the terminal state when it lies past the last sample.
  std::vector<SystemState> with_terminal() const;
};

std::uint64_t fingerprint(const ChemostatModel& model, const IntegratorConfig& config);

Trajectory simulate(const ChemostatModel& model, const SystemState& init, double horizon,
                    const IntegratorConfig& config, RngStream& rng);
Trajectory simulate_boundary(const ChemostatModel& model, double s0, std::size_t regime0, double horizon,
                             const IntegratorConfig& config, RngStream& rng);
// Full system and boundary system driven by the same variates and the same
// regime path (the full system's switching decisions).
std::pair<Trajectory, Trajectory> simulate_coupled_pair(const ChemostatModel& model, const SystemState& init,
                                                        double horizon, const IntegratorConfig& config,
                                                        RngStream& rng);

// Streams a path to visit(step_index, state) for step_index = 1..n without
// recording it. The last step is shortened so the path ends exactly at
// init.t + horizon. Returns the terminal state. Errors carry the step index.
template <class Visitor>
SystemState integrate(const ChemostatModel& model, const SystemState& init, double horizon,
                      const IntegratorConfig& config, RngStream& rng, Visitor&& visit,
                      std::size_t* floor_hits = nullptr) {
  const std::size_t n = step_count(horizon, config.dt);
  SystemState state = init;
  std::size_t hits = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t_next = (k == n) ? init.t + horizon : init.t + static_cast<double>(k) * config.dt;
    const double h = t_next - state.t;
    const StepVariates v = draw_step_variates(rng);
    bool hit = false;
    try {
      state = step(model, state, h, config.positivity_floor, v, &hit);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at step " + std::to_string(k));
    }
    state.t = t_next;
    hits += hit ? 1 : 0;
    visit(k, state);
  }
  if (floor_hits != nullptr) *floor_hits += hits;
  return state;
}

}  // namespace chemostat

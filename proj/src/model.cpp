#include "chemostat/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace chemostat {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::string regime_field(std::size_t i, const char* name) {
  // Reported 1-based to match configuration files.
  return "regimes[" + std::to_string(i + 1) + "]." + name;
}

// Every state reachable from state 0 and state 0 reachable from every state.
bool strongly_connected(const std::vector<std::vector<double>>& q) {
  const std::size_t n = q.size();
  auto reach_all = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    seen[0] = true;
    frontier.push(0);
    while (!frontier.empty()) {
      const std::size_t i = frontier.front();
      frontier.pop();
      for (std::size_t j = 0; j < n; ++j) {
        const double r = transpose ? q[j][i] : q[i][j];
        if (j != i && r > 0.0 && !seen[j]) {
          seen[j] = true;
          frontier.push(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

SwitchingGenerator::SwitchingGenerator() : dimension_(1), matrix_{{0.0}} {}

SwitchingGenerator::SwitchingGenerator(std::vector<std::vector<double>> matrix)
    : dimension_(matrix.size()), matrix_(std::move(matrix)) {}

SwitchingGenerator::SwitchingGenerator(std::size_t dimension, RateFunction rate)
    : dimension_(dimension), rate_(std::move(rate)) {
  if (!rate_) throw Error(ErrorCode::InvalidArgument, "state-dependent generator needs a rate function");
}

double SwitchingGenerator::rate(std::size_t i, std::size_t j, double s, double x) const {
  if (i == j) return -exit_rate(i, s, x);
  const double r = rate_ ? rate_(i, j, s, x) : matrix_[i][j];
  if (!(r >= 0.0) || !std::isfinite(r)) {
    std::ostringstream msg;
    msg << "switching rate q_" << i + 1 << j + 1 << " = " << r << " at (s=" << s << ", x=" << x
        << ") must be finite and nonnegative";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return r;
}

double SwitchingGenerator::exit_rate(std::size_t i, double s, double x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < dimension_; ++j) {
    if (j != i) total += rate(i, j, s, x);
  }
  return total;
}

double SwitchingGenerator::max_exit_rate() const {
  if (!is_constant()) return 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < dimension_; ++j) {
      if (j != i) total += std::max(matrix_[i][j], 0.0);
    }
    best = std::max(best, total);
  }
  return best;
}

std::vector<double> SwitchingGenerator::stationary_distribution() const {
  if (!is_constant()) {
    throw Error(ErrorCode::InvalidArgument, "stationary distribution needs a constant generator");
  }
  // Solve nu Q = 0 with sum(nu) = 1: replace the last equation by the
  // normalization and run Gaussian elimination with partial pivoting on Q^T.
  const std::size_t n = dimension_;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a[r][c] = matrix_[c][r];
  }
  for (std::size_t c = 0; c < n; ++c) a[n - 1][c] = 1.0;
  a[n - 1][n] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    if (a[col][col] == 0.0) throw Error(ErrorCode::GeneratorNotIrreducible, "singular stationary system");
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> nu(n);
  for (std::size_t i = 0; i < n; ++i) nu[i] = a[i][n] / a[i][i];
  return nu;
}

bool SwitchingGenerator::operator==(const SwitchingGenerator& other) const {
  if (this == &other) return true;
  return is_constant() && other.is_constant() && matrix_ == other.matrix_;
}

ChemostatModel ChemostatModel::with_theta(double new_theta) const {
  ChemostatModel copy = *this;
  copy.theta = new_theta;
  return copy;
}

bool ValidationReport::has(ErrorCode code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [code](const Violation& v) { return v.code == code; });
}

ValidationReport validate(const ChemostatModel& model) {
  ValidationReport report;
  auto fail = [&](ErrorCode code, std::string field, std::string message) {
    report.violations.push_back({code, std::move(field), std::move(message)});
  };
  auto positive = [&](double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::NonPositiveParameter, field, "must be positive and finite");
  };
  auto nonnegative = [&](double v, const std::string& field) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::NonPositiveParameter, field, "must be nonnegative and finite");
  };

  positive(model.S0, "S0");
  positive(model.theta, "theta");
  positive(model.K_S, "K_S");
  nonnegative(model.R, "R");

  if (model.regimes.empty()) fail(ErrorCode::DimensionMismatch, "regimes", "at least one regime is required");
  for (std::size_t i = 0; i < model.regimes.size(); ++i) {
    const auto& r = model.regimes[i];
    positive(r.k_m, regime_field(i, "k_m"));
    positive(r.k_d, regime_field(i, "k_d"));
    positive(r.Y, regime_field(i, "Y"));
    if (model.allow_degenerate_noise) {
      nonnegative(r.sigma1, regime_field(i, "sigma1"));
    } else {
      positive(r.sigma1, regime_field(i, "sigma1"));
    }
    nonnegative(r.sigma2, regime_field(i, "sigma2"));
  }

  const auto& gen = model.generator;
  if (gen.dimension() != model.regimes.size()) {
    fail(ErrorCode::DimensionMismatch, "generator",
         "dimension " + std::to_string(gen.dimension()) + " does not match " +
             std::to_string(model.regimes.size()) + " regimes");
    return report;
  }
  if (!gen.is_constant()) return report;

  const auto& q = gen.matrix();
  bool shape_ok = true;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].size() != q.size()) {
      fail(ErrorCode::DimensionMismatch, "generator[" + std::to_string(i + 1) + "]", "row is not square");
      shape_ok = false;
    }
  }
  if (!shape_ok) return report;

  for (std::size_t i = 0; i < q.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      sum += q[i][j];
      if (j != i && (!(q[i][j] >= 0.0) || !std::isfinite(q[i][j]))) {
        fail(ErrorCode::NonPositiveParameter,
             "generator[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]",
             "off-diagonal rates must be nonnegative");
      }
    }
    if (!(std::abs(sum) <= kRowSumTolerance)) {
      std::ostringstream msg;
      msg << "row sums to " << sum;
      fail(ErrorCode::GeneratorRowSumNonzero, "generator[" + std::to_string(i + 1) + "]", msg.str());
    }
  }
  if (q.size() > 1 && !strongly_connected(q)) {
    fail(ErrorCode::GeneratorNotIrreducible, "generator", "some regime cannot reach another through positive rates");
  }
  return report;
}

void require_valid(const ChemostatModel& model) {
  auto report = validate(model);
  if (!report.ok()) throw ValidationError(std::move(report.violations));
}

void require_valid_state(const ChemostatModel& model, const SystemState& state) {
  if (!(state.s >= 0.0) || !(state.x >= 0.0) || !std::isfinite(state.s) || !std::isfinite(state.x)) {
    throw Error(ErrorCode::InvalidState, "state must satisfy s >= 0 and x >= 0");
  }
  if (state.regime >= model.regime_count()) {
    throw Error(ErrorCode::InvalidState, "regime index out of range");
  }
}

Vec2 drift(const ChemostatModel& model, const SystemState& state) {
  const auto& r = model.regimes[state.regime];
  const double monod = state.s / (model.K_S + state.s);
  return {(model.S0 - state.s) / model.theta - r.k_m * monod * state.x,
          state.x * (r.k_m * r.Y * monod - r.k_d - (1.0 + model.R) / model.theta)};
}

Vec2 diffusion(const ChemostatModel& model, const SystemState& state) {
  const auto& r = model.regimes[state.regime];
  return {r.sigma1 * state.s, r.sigma2 * state.x};
}

double lambda_integrand(const ChemostatModel& model, double s, std::size_t regime) {
  const auto& r = model.regimes[regime];
  return r.k_m * r.Y * s / (model.K_S + s) - r.k_d - (1.0 + model.R) / model.theta -
         0.5 * r.sigma2 * r.sigma2;
}

double pstar_bound(const ChemostatModel& model) {
  double sigma1_min = std::numeric_limits<double>::infinity();
  double sigma2_min = std::numeric_limits<double>::infinity();
  double kd_max = 0.0;
  for (const auto& r : model.regimes) {
    sigma1_min = std::min(sigma1_min, r.sigma1);
    sigma2_min = std::min(sigma2_min, r.sigma2);
    kd_max = std::max(kd_max, r.k_d);
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!(sigma2_min > 0.0)) return inf;
  const double substrate_term = sigma1_min > 0.0 ? 2.0 / (model.theta * sigma1_min * sigma1_min) : inf;
  const double biomass_term = 2.0 * (kd_max + (1.0 + model.R) / model.theta) / (sigma2_min * sigma2_min);
  return std::min(substrate_term, biomass_term);
}

double max_yield(const ChemostatModel& model) {
  double y = 0.0;
  for (const auto& r : model.regimes) y = std::max(y, r.Y);
  return y;
}

namespace presets {

ChemostatModel example1() {
  ChemostatModel m;
  m.S0 = 15.0;
  m.theta = 5.0;
  m.K_S = 60.0;
  m.R = 0.0;
  m.regimes = {
      {.k_m = 9.0, .k_d = 0.06, .Y = 0.8, .sigma1 = 0.1, .sigma2 = 0.2},
      {.k_m = 6.0, .k_d = 0.08, .Y = 0.6, .sigma1 = 1.0, .sigma2 = 0.1},
  };
  m.generator = SwitchingGenerator({{-0.2, 0.2}, {0.8, -0.8}});
  return m;
}

ChemostatModel example2() {
  ChemostatModel m;
  m.S0 = 12.0;
  m.theta = 1.0;
  m.K_S = 60.0;
  m.R = 0.0;
  m.regimes = {{.k_m = 8.0, .k_d = 0.06, .Y = 0.6, .sigma1 = 0.2, .sigma2 = 0.2}};
  return m;
}

ChemostatModel example3() {
  ChemostatModel m = example2();
  m.theta = 5.0;
  return m;
}

}  // namespace presets

}  // namespace chemostat

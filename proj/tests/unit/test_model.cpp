#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "chemostat/model.hpp"

using namespace chemostat;

namespace {

// Second, independent evaluation of the moment-exponent bound.
double pstar_oracle(double theta, double R, std::vector<double> s1, std::vector<double> s2, std::vector<double> kd) {
  const double a = *std::min_element(s1.begin(), s1.end());
  const double b = *std::min_element(s2.begin(), s2.end());
  const double k = *std::max_element(kd.begin(), kd.end());
  const double first = 2.0 / (theta * a * a);
  const double second = 2.0 * (k + (1.0 + R) / theta) / (b * b);
  return first < second ? first : second;
}

}  // namespace

TEST_CASE("paper example parameter sets validate") {
  CHECK(validate(presets::example1()).ok());
  CHECK(validate(presets::example2()).ok());
  CHECK(validate(presets::example3()).ok());
}

TEST_CASE("validate reports the violated invariant") {
  SUBCASE("reducible generator") {
    auto m = presets::example1();
    m.generator = SwitchingGenerator({{-0.2, 0.2}, {0.0, 0.0}});
    const auto report = validate(m);
    CHECK(report.has(ErrorCode::GeneratorNotIrreducible));
    CHECK_FALSE(report.has(ErrorCode::GeneratorRowSumNonzero));
  }
  SUBCASE("theta = 0") {
    auto m = presets::example3();
    m.theta = 0.0;
    CHECK(validate(m).has(ErrorCode::NonPositiveParameter));
  }
  SUBCASE("row sum off zero") {
    auto m = presets::example1();
    m.generator = SwitchingGenerator({{-0.2, 0.3}, {0.8, -0.8}});
    CHECK(validate(m).has(ErrorCode::GeneratorRowSumNonzero));
  }
  SUBCASE("dimension mismatch") {
    auto m = presets::example3();
    m.generator = SwitchingGenerator({{-0.2, 0.2}, {0.8, -0.8}});
    CHECK(validate(m).has(ErrorCode::DimensionMismatch));
  }
  SUBCASE("every violation is listed") {
    auto m = presets::example1();
    m.S0 = -1.0;
    m.K_S = 0.0;
    m.regimes[1].k_d = 0.0;
    const auto report = validate(m);
    CHECK(report.violations.size() == 3);
    CHECK_THROWS_AS(require_valid(m), ValidationError);
  }
  SUBCASE("sigma1 = 0 only in degenerate mode") {
    auto m = presets::example3();
    m.regimes[0].sigma1 = 0.0;
    CHECK(validate(m).has(ErrorCode::NonPositiveParameter));
    m.allow_degenerate_noise = true;
    CHECK(validate(m).ok());
  }
  SUBCASE("R >= 0, sigma2 >= 0 allowed at zero") {
    auto m = presets::example3();
    m.R = 0.0;
    m.regimes[0].sigma2 = 0.0;
    CHECK(validate(m).ok());
    m.R = -0.1;
    CHECK(validate(m).has(ErrorCode::NonPositiveParameter));
  }
}

TEST_CASE("single-field corruptions of the example sets are rejected") {
  for (const auto& base : {presets::example1(), presets::example2(), presets::example3()}) {
    for (std::size_t field = 0; field < 8; ++field) {
      auto m = base;
      switch (field) {
        case 0: m.S0 = -m.S0; break;
        case 1: m.theta = -m.theta; break;
        case 2: m.K_S = -m.K_S; break;
        case 3: m.regimes[0].k_m = -m.regimes[0].k_m; break;
        case 4: m.regimes[0].k_d = -m.regimes[0].k_d; break;
        case 5: m.regimes[0].Y = -m.regimes[0].Y; break;
        case 6: m.regimes[0].sigma1 = -m.regimes[0].sigma1; break;
        case 7: m.regimes.clear(); break;
      }
      CHECK_FALSE(validate(m).ok());
    }
  }
  auto m = presets::example1();
  m.generator = SwitchingGenerator({{0.0, 0.0}, {0.8, -0.8}});  // zero row
  CHECK(validate(m).has(ErrorCode::GeneratorNotIrreducible));
}

TEST_CASE("constant generator rows sum to zero after construction") {
  const auto m = presets::example1();
  for (const auto& row : m.generator.matrix()) {
    double sum = 0.0;
    for (double q : row) sum += q;
    CHECK(std::abs(sum) <= 1e-12);
  }
  CHECK(SwitchingGenerator::single_regime().dimension() == 1);
  CHECK(SwitchingGenerator::single_regime().matrix()[0][0] == 0.0);
}

TEST_CASE("state-dependent generator rebuilds its diagonal and rejects negative rates") {
  SwitchingGenerator g(2, [](std::size_t i, std::size_t, double s, double x) { return i == 0 ? 0.1 * s : 0.5 + x; });
  CHECK(g.rate(0, 1, 3.0, 0.0) == doctest::Approx(0.3));
  CHECK(g.rate(0, 0, 3.0, 0.0) == doctest::Approx(-0.3));
  CHECK(g.rate(1, 1, 0.0, 2.0) == doctest::Approx(-2.5));
  SwitchingGenerator bad(2, [](std::size_t, std::size_t, double, double) { return -1.0; });
  CHECK_THROWS_AS(bad.exit_rate(0, 1.0, 1.0), Error);
}

TEST_CASE("stationary distribution solves nu Q = 0") {
  // Two-state chain: nu = (q21, q12) / (q12 + q21) = (0.8, 0.2).
  const auto nu = presets::example1().generator.stationary_distribution();
  CHECK(nu[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(nu[1] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("drift") {
  const auto m3 = presets::example3();
  SUBCASE("boundary equilibrium at S0") {
    for (std::size_t i = 0; i < 1; ++i) {
      const auto d = drift(m3, {0.0, m3.S0, 0.0, i});
      CHECK(d.s == 0.0);
      CHECK(d.x == 0.0);
    }
  }
  SUBCASE("example 3 at s = 12, x = 1") {
    const auto d = drift(m3, {0.0, 12.0, 1.0, 0});
    CHECK(d.s == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
    CHECK(d.x == doctest::Approx(0.54).epsilon(1e-14));
  }
  SUBCASE("switching model uses the regime's coefficients") {
    const auto m1 = presets::example1();
    const auto d = drift(m1, {0.0, 15.0, 2.0, 1});
    // regime 2: k_m = 6, Y = 0.6, k_d = 0.08; s/(K_S + s) = 0.2
    CHECK(d.s == doctest::Approx(-6.0 * 0.2 * 2.0).epsilon(1e-14));
    CHECK(d.x == doctest::Approx(2.0 * (6.0 * 0.6 * 0.2 - 0.08 - 0.2)).epsilon(1e-14));
  }
}

TEST_CASE("diffusion") {
  const auto m3 = presets::example3();
  CHECK(diffusion(m3, {0.0, 5.0, 0.0, 0}).x == 0.0);
  CHECK(diffusion(m3, {0.0, 0.0, 5.0, 0}).s == 0.0);
  const auto g = diffusion(m3, {0.0, 10.0, 2.0, 0});
  CHECK(g.s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.x == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("lambda integrand") {
  const auto m2 = presets::example2();
  const auto m3 = presets::example3();
  CHECK(lambda_integrand(m3, 0.0, 0) == doctest::Approx(-0.06 - 0.2 - 0.02).epsilon(1e-14));
  CHECK(lambda_integrand(m2, 12.0, 0) == doctest::Approx(-0.28).epsilon(1e-13));
  CHECK(lambda_integrand(m3, 1e12, 0) == doctest::Approx(4.52).epsilon(1e-9));
}

TEST_CASE("lambda integrand is nondecreasing and bounded on random grids") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> s_dist(0.0, 500.0);
  for (const auto& m : {presets::example1(), presets::example2(), presets::example3()}) {
    for (std::size_t i = 0; i < m.regime_count(); ++i) {
      const auto& r = m.regimes[i];
      const double bound = r.k_m * r.Y - r.k_d - (1.0 + m.R) / m.theta - 0.5 * r.sigma2 * r.sigma2;
      std::vector<double> grid(200);
      for (auto& s : grid) s = s_dist(gen);
      std::sort(grid.begin(), grid.end());
      for (std::size_t k = 1; k < grid.size(); ++k) {
        CHECK(lambda_integrand(m, grid[k], i) >= lambda_integrand(m, grid[k - 1], i));
        CHECK(lambda_integrand(m, grid[k], i) <= bound);
      }
    }
  }
}

TEST_CASE("drift and diffusion are finite on valid states") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> v(0.0, 1e3);
  const auto m = presets::example1();
  for (int k = 0; k < 1000; ++k) {
    const SystemState st{0.0, v(gen), v(gen), static_cast<std::size_t>(k % 2)};
    const auto d = drift(m, st);
    const auto g = diffusion(m, st);
    CHECK((std::isfinite(d.s) && std::isfinite(d.x) && std::isfinite(g.s) && std::isfinite(g.x)));
  }
}

TEST_CASE("moment exponent bound") {
  CHECK(pstar_bound(presets::example3()) == doctest::Approx(10.0).epsilon(1e-14));

  ChemostatModel sym;
  sym.S0 = 1.0;
  sym.theta = 1.0;
  sym.K_S = 1.0;
  sym.R = 0.0;
  sym.regimes = {{.k_m = 1.0, .k_d = 0.0, .Y = 1.0, .sigma1 = std::sqrt(2.0), .sigma2 = std::sqrt(2.0)}};
  CHECK(pstar_bound(sym) == doctest::Approx(1.0).epsilon(1e-14));

  const auto m1 = presets::example1();
  CHECK(pstar_bound(m1) == doctest::Approx(pstar_oracle(5.0, 0.0, {0.1, 1.0}, {0.2, 0.1}, {0.06, 0.08})).epsilon(1e-14));

  auto no_noise = presets::example3();
  no_noise.regimes[0].sigma2 = 0.0;
  CHECK(pstar_bound(no_noise) == std::numeric_limits<double>::infinity());
}

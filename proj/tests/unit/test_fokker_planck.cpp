// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "awm/error.hpp"
#include "awm/fokker_planck.hpp"

using namespace awm;

namespace {

double mass(const WealthDistribution& d) {
  auto h = trapezoid_weights(d.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += h[i] * d.density[i];
  return s;
}

double wealth(const WealthDistribution& d) {
  auto h = trapezoid_weights(d.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += h[i] * d.density[i] * d.grid[i];
  return s + d.condensed_fraction * d.total_wealth;
}

}  // namespace

TEST_CASE("shifted grid") {
  auto x = make_shifted_grid(GridSpec{500, 1e3, 1e-3}, 2.0);
  REQUIRE(x.size() == 500);
  CHECK(x.front() == 0.0);
  CHECK(x.back() == doctest::Approx(2e3));
  for (std::size_t i = 1; i < x.size(); ++i) REQUIRE(x[i] > x[i - 1]);
  // geometric part: neighbouring ratios are constant
  double r1 = x[400] / x[399], r2 = x[450] / x[449];
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("initial distribution carries N and W") {
  auto p = ModelParams::make(0.2, 0.5, 1000, 1000.0);
  auto d = initial_distribution(p, GridSpec{800, 1e4, 1e-3});
  d.validate(1e-10);
  CHECK(d.grid.front() == doctest::Approx(-p.delta()));
  auto c = initial_distribution(p, GridSpec{800, 1e4, 1e-3}, 0.4);
  c.validate(1e-10);
  CHECK(c.condensed_fraction == doctest::Approx(0.4));
}

TEST_CASE("time marching conserves agents and wealth") {
  auto p = ModelParams::make(0.3, 0.2, 1000, 1000.0);
  SolverConfig cfg;
  cfg.grid = GridSpec{600, 1e3, 1e-3};
  cfg.dt = 0.1;
  auto d0 = initial_distribution(p, cfg.grid);
  auto d1 = evolve(d0, p, RedistributionPolicy::flat(0.5), cfg, 5.0);
  CHECK(mass(d1) == doctest::Approx(1000.0).epsilon(1e-10));
  CHECK(wealth(d1) == doctest::Approx(1000.0).epsilon(1e-10));
  for (double v : d1.density) CHECK(v >= 0.0);
}

TEST_CASE("explicit marching above the stability bound is refused") {
  auto p = ModelParams::make(0.3, 0.0, 1000, 1000.0);
  SolverConfig cfg;
  cfg.grid = GridSpec{400, 1e3, 1e-3};
  cfg.stepping = Stepping::explicit_euler;
  auto d0 = initial_distribution(p, cfg.grid);
  auto pol = RedistributionPolicy::flat(0.5);
  double bound = explicit_step_bound(d0, p, pol, cfg);
  CHECK(bound > 0.0);
  cfg.dt = 2.0 * bound;
  try {
    evolve(d0, p, pol, cfg, 1.0);
    FAIL("expected step-size error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::step_size);
  }
  cfg.dt = 0.5 * bound;
  auto d1 = evolve(d0, p, pol, cfg, 20.0 * cfg.dt);
  CHECK(mass(d1) == doctest::Approx(1000.0).epsilon(1e-10));
}

TEST_CASE("steady states across the transition") {
  SolverConfig cfg;
  SUBCASE("subcritical") {
    auto p = ModelParams::make(0.1, 0.0, 10000, 10000.0);
    auto r = steady_state(p, RedistributionPolicy::flat(0.2), cfg);
    CHECK(r.converged);
    CHECK(r.distribution.condensed_fraction <= 0.01);
    CHECK(residual(r.distribution, p, RedistributionPolicy::flat(0.2)) <= 1e-8);
  }
  SUBCASE("supercritical") {
    auto p = ModelParams::make(0.2, 0.0, 10000, 10000.0);
    auto r = steady_state(p, RedistributionPolicy::flat(0.1), cfg);
    CHECK(r.converged);
    CHECK(r.distribution.condensed_fraction == doctest::Approx(0.5).epsilon(1e-3));
  }
  SUBCASE("supercritical with debt") {
    auto p = ModelParams::make(0.2, 0.5, 10000, 10000.0);
    auto r = steady_state(p, RedistributionPolicy::flat(0.1), cfg);
    CHECK(r.converged);
    CHECK(r.distribution.condensed_fraction == doctest::Approx(0.75).epsilon(1e-3));
    CHECK(r.distribution.grid.front() == doctest::Approx(-0.5));
  }
  SUBCASE("upwind flux lands on the same condensate") {
    cfg.flux = FluxScheme::upwind;
    auto p = ModelParams::make(0.2, 0.0, 10000, 10000.0);
    auto r = steady_state(p, RedistributionPolicy::flat(0.1), cfg);
    CHECK(r.converged);
    CHECK(r.distribution.condensed_fraction == doctest::Approx(0.5).epsilon(1e-2));
  }
}

TEST_CASE("step budget exhaustion is reported, not thrown") {
  SolverConfig cfg;
  cfg.max_steps = 1;
  auto p = ModelParams::make(0.2, 0.0, 10000, 10000.0);
  auto r = steady_state(p, RedistributionPolicy::flat(0.1), cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.steps == 1);
  r.distribution.validate(1e-9);
}

TEST_CASE("steady state gini grows with the advantage") {
  SolverConfig cfg;
  auto p1 = ModelParams::make(0.05, 0.0, 10000, 10000.0);
  auto p2 = ModelParams::make(0.15, 0.0, 10000, 10000.0);
  auto pol = RedistributionPolicy::flat(0.2);
  double g1 = gini(steady_state(p1, pol, cfg).distribution);
  double g2 = gini(steady_state(p2, pol, cfg).distribution);
  CHECK(g1 > 0.0);
  CHECK(g2 > g1);
  CHECK(g2 < 1.0);
}

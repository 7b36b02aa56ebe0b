// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "awm/error.hpp"
#include "awm/fokker_planck.hpp"
#include "awm/kinetics.hpp"

using namespace awm;

TEST_CASE("transaction with a forced winner") {
  double a = 1.0, b = 3.0;
  TransactionCounters c;
  transact(a, b, 0.0, 2.0, 0.0, 0.04, 0.0, true, c);
  CHECK(a == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(b == doctest::Approx(2.8).epsilon(1e-15));
  CHECK(c.clamps == 0);
}

TEST_CASE("fair coin splits at one half") {
  double a = 1.0, b = 3.0;
  TransactionCounters c;
  transact(a, b, 0.0, 2.0, 0.0, 0.04, 0.4999, false, c);
  CHECK(a > 1.0);
  a = 1.0, b = 3.0;
  transact(a, b, 0.0, 2.0, 0.0, 0.04, 0.5001, false, c);
  CHECK(a < 1.0);
}

TEST_CASE("bias clamp") {
  // zeta = 2, dt = 1, (w - x)/mu_bar = 0.8 -> E[eta] = 1.6
  double a = 1.8, b = 1.0;
  TransactionCounters c;
  transact(a, b, 0.0, 1.0, 2.0, 1.0, 0.999999, false, c);
  CHECK(c.clamps == 1);
  CHECK(a == doctest::Approx(2.8));
  CHECK(b == doctest::Approx(0.0));
}

TEST_CASE("shifted frame uses the debt limit") {
  double a = -0.5, b = 1.0;
  TransactionCounters c;
  transact(a, b, 1.0, 2.0, 0.0, 0.25, 0.9, false, c);
  // stake = 0.5 * min(0.5, 2.0); b wins
  CHECK(a == doctest::Approx(-0.75));
  CHECK(b == doctest::Approx(1.25));
}

TEST_CASE("sweep conserves wealth and keeps the floor") {
  auto params = ModelParams::make(0.5, 0.3, 500, 500.0);
  Rng rng(3);
  auto e = exponential_ensemble(params, rng);
  SimConfig cfg;
  cfg.dt = 0.05;
  auto pol = RedistributionPolicy::flat(0.2);
  for (int k = 0; k < 200; ++k) {
    auto d = sweep(e, params, pol, cfg, rng);
    CHECK(d.wealth_drift <= 1e-12);
  }
  double total = std::accumulate(e.wealths.begin(), e.wealths.end(), 0.0);
  CHECK(total == doctest::Approx(500.0).epsilon(1e-11));
  for (double w : e.wealths) CHECK(w >= -params.delta());
  CHECK(e.epoch == 200);
}

TEST_CASE("redistribution step too large is an error") {
  auto params = ModelParams::make(0.0, 0.0, 4, 4.0);
  AgentEnsemble e = equal_ensemble(params);
  Rng rng(1);
  SimConfig cfg;
  cfg.dt = 3.0;
  try {
    sweep(e, params, RedistributionPolicy::flat(0.5), cfg, rng);
    FAIL("expected step-size error");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::step_size);
  }
}

TEST_CASE("no wealth, no coin, no redistribution keeps wealth nonnegative") {
  auto params = ModelParams::make(0.0, 0.0, 2, 4.0);
  AgentEnsemble e{{1.0, 3.0}, 0};
  Rng rng(9);
  SimConfig cfg;
  cfg.dt = 0.5;
  for (int k = 0; k < 2000; ++k) {
    sweep(e, params, RedistributionPolicy::flat(0.0), cfg, rng);
    CHECK(std::min(e.wealths[0], e.wealths[1]) >= 0.0);
  }
}

TEST_CASE("histogram of a point mass") {
  auto params = ModelParams::make(0.0, 0.0, 3, 3.0);
  AgentEnsemble e{{1.0, 1.0, 1.0}, 0};
  auto d = histogram(e, params, {0.0, 1.0, 2.0, 3.0});
  CHECK(d.density[0] == 0.0);
  CHECK(d.density[1] == doctest::Approx(3.0));
  CHECK(d.density[2] == 0.0);
  CHECK(d.density[3] == 0.0);
  CHECK(d.condensed_fraction == 0.0);
}

TEST_CASE("histogram matches direct counting") {
  auto params = ModelParams::make(0.0, 0.0, 2, 2.0);
  AgentEnsemble e{{0.0, 2.0}, 0};
  std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
  auto d = histogram(e, params, grid);
  auto h = trapezoid_weights(grid);
  std::vector<double> counts{1, 0, 0, 0, 1};
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(d.density[i] * h[i] == doctest::Approx(counts[i]));
  d.validate();
}

TEST_CASE("histogram flags agents outside the grid") {
  auto params = ModelParams::make(0.0, 0.0, 3, 3.0);
  AgentEnsemble e{{0.5, 0.5, 2.0}, 0};
  try {
    histogram(e, params, {0.0, 1.0});
    FAIL("expected range error");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::range);
  }
}

TEST_CASE("one agent holding half the wealth is condensed") {
  const std::int64_t n = 10000;
  auto params = ModelParams::make(0.0, 0.0, n, static_cast<double>(n));
  AgentEnsemble e;
  e.wealths.assign(n, 0.5 * n / (n - 1));
  e.wealths[42] = 0.5 * n;
  CHECK(oligarchs(e, params) == std::vector<std::size_t>{42});
  auto grid = make_shifted_grid(GridSpec{400, 1e4, 1e-3}, params.mu_bar());
  auto d = histogram(e, params, grid);
  CHECK(d.condensed_fraction == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("summary shares") {
  auto params = ModelParams::make(0.0, 0.0, 10, 10.0);
  AgentEnsemble e;
  e.wealths = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 5.0};
  auto row = summarize(e, params);
  CHECK(row.top1_share == doctest::Approx(0.5));
  CHECK(row.top10_share == doctest::Approx(0.5));
  CHECK(row.total_wealth == doctest::Approx(10.0));
}

TEST_CASE("runs are reproducible from the seed") {
  auto params = ModelParams::make(0.3, 0.2, 200, 200.0);
  SimConfig cfg;
  cfg.sweeps = 300;
  cfg.seed = 11;
  cfg.snapshot_stride = 50;
  auto pol = RedistributionPolicy::flat(0.1);
  auto a = run(cfg, params, pol, equal_ensemble(params));
  auto b = run(cfg, params, pol, equal_ensemble(params));
  CHECK(a.final_state.wealths == b.final_state.wealths);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) CHECK(a.trajectory[i].gini == b.trajectory[i].gini);
  cfg.seed = 12;
  auto c = run(cfg, params, pol, equal_ensemble(params));
  CHECK(c.final_state.wealths != a.final_state.wealths);
}

TEST_CASE("averaged histogram window") {
  auto params = ModelParams::make(0.1, 0.0, 200, 200.0);
  SimConfig cfg;
  cfg.sweeps = 400;
  cfg.snapshot_stride = 100;
  cfg.average_from = 200;
  auto r = run(cfg, params, RedistributionPolicy::flat(0.3), equal_ensemble(params));
  CHECK(r.averaged_count == 3);
  r.averaged.validate(1e-9);
}

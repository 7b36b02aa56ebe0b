// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "awm/error.hpp"
#include "awm/fitting.hpp"
#include "awm/model.hpp"

using namespace awm;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an awm::Error");
  return Errc::io;
}

// Midpoint-rule oracle for the L1 distance.
double brute_l1(const LorenzCurve& a, const LorenzCurve& b, int n = 2000000) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double f = (i + 0.5) / n;
    s += std::abs(lorenz_value(a, f) - lorenz_value(b, f));
  }
  return s / n;
}

}  // namespace

TEST_CASE("discrepancy by hand") {
  LorenzCurve diag{{1.0, 1.0}};
  LorenzCurve kink{{0.5, 0.0}, {1.0, 1.0}};
  CHECK(discrepancy(diag, diag) == 0.0);
  CHECK(discrepancy(diag, kink) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(discrepancy(kink, diag) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("discrepancy across a crossing") {
  LorenzCurve a{{0.25, 0.05}, {1.0, 1.0}};
  LorenzCurve b{{0.75, 0.5}, {1.0, 1.0}};
  double j = discrepancy(a, b);
  CHECK(j == doctest::Approx(brute_l1(a, b)).epsilon(1e-9));
  // the signed integral is smaller than the absolute one
  CHECK(j > std::abs(lorenz_area(LorenzCurve{{0, 0}, {0.25, 0.05}, {1, 1}}) -
                     lorenz_area(LorenzCurve{{0, 0}, {0.75, 0.5}, {1, 1}})));
}

TEST_CASE("vertical terminal segment uses the left limit") {
  LorenzCurve c{{0.5, 0.25}, {1.0, 0.5}, {1.0, 1.0}};
  CHECK(lorenz_value(c, 1.0) == doctest::Approx(0.5));
  CHECK(lorenz_value(c, 0.75) == doctest::Approx(0.375));
  LorenzCurve d{{1.0, 1.0}};
  // area between y = F/2 and y = F
  CHECK(discrepancy(c, d) == doctest::Approx(0.25));
}

TEST_CASE("survey records to a weighted curve") {
  auto e = survey_lorenz({3.0, 1.0, 2.0}, {1.0, 1.0, 2.0});
  REQUIRE(e.points.size() == 3);
  CHECK(e.points[0].f == doctest::Approx(0.25));
  CHECK(e.points[0].l == doctest::Approx(1.0 / 8.0));
  CHECK(e.points[1].f == doctest::Approx(0.75));
  CHECK(e.points[1].l == doctest::Approx(5.0 / 8.0));
  CHECK(e.points[2].f == 1.0);
  CHECK(e.points[2].l == 1.0);
}

TEST_CASE("survey errors name the record") {
  try {
    survey_lorenz({1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}, {2, 3, 4}, "s.csv");
    FAIL("expected record error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::record);
    CHECK(std::string(e.what()).find("s.csv:3") != std::string::npos);
  }
  CHECK(code_of([] { survey_lorenz({1.0, NAN}, {1.0, 1.0}); }) == Errc::parse);
  CHECK(code_of([] { load_survey("/nonexistent/survey.csv"); }) == Errc::io);
}

TEST_CASE("empirical curve validation") {
  EmpiricalLorenz e;
  e.points = {{0.5, 0.2}, {0.5, 0.3}, {1.0, 1.0}};
  CHECK(code_of([&] { e.validate(); }) == Errc::argument);
  e.points = {{0.5, 0.2}, {1.0, 0.9}};
  CHECK(code_of([&] { e.validate(); }) == Errc::argument);
}

TEST_CASE("local error is a perpendicular distance") {
  LorenzCurve diag{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(local_error({0.5, 0.5}, diag) == doctest::Approx(0.0));
  CHECK(local_error({0.5, 0.0}, diag) == doctest::Approx(0.5 / std::sqrt(2.0)));
  // beyond the end of the polyline the distance is to the end point
  CHECK(local_error({1.0, 2.0}, diag) == doctest::Approx(1.0));
}

TEST_CASE("sample_lorenz closes at (1, 1)") {
  LorenzCurve m{{0.0, 0.0}, {0.5, 0.1}, {1.0, 0.4}, {1.0, 1.0}};
  auto e = sample_lorenz(m, 4);
  REQUIRE(e.points.size() == 4);
  CHECK(e.points[1].f == 0.5);
  CHECK(e.points[1].l == doctest::Approx(0.1));
  CHECK(e.points[2].l == doctest::Approx(0.25));
  CHECK(e.points[3].l == 1.0);
}

TEST_CASE("table and scatter formatting") {
  std::vector<CriticalityRow> rows{{"AT", 0.15612, 0.18249, 0.1851, 0.76301, 0.01234},
                                   {"BE", 1.406, 1.514, 0.577, 0.589, 0.002}};
  CHECK(criticality_table_csv(rows) ==
        "label,chi_opt,zeta_opt,lambda_opt,G_fit,avg_local_error_pct\n"
        "AT,0.156,0.182,0.185,0.763,1.23\n"
        "BE,1.406,1.514,0.577,0.589,0.20\n");
  CHECK(criticality_scatter_csv(rows) == "zeta_opt,chi_opt\n0.18249,0.15612\n1.514,1.406\n");
  auto line = reference_line_csv(rows);
  CHECK(line.rfind("zeta,chi\n0,0\n", 0) == 0);
}

TEST_CASE("fit result JSON round trip") {
  FitResult r;
  r.chi = 0.5;
  r.zeta = 0.6;
  r.lambda = 0.25;
  r.j = 1e-4;
  r.gini = 0.61;
  r.avg_local_error = 0.003;
  r.criticality_ratio = 0.5 / 0.6;
  r.boundary_hit = true;
  r.boundary_parameters = {"lambda"};
  r.source = "x.csv";
  r.seed = 9;
  auto back = parse_fit_result(fit_result_json(r));
  CHECK(back.chi == r.chi);
  CHECK(back.zeta == r.zeta);
  CHECK(back.lambda == r.lambda);
  CHECK(back.j == r.j);
  CHECK(back.boundary_hit);
  CHECK(back.seed == 9);
  CHECK(code_of([] { parse_fit_result("{\"chi_opt\": 1}"); }) == Errc::parse);
}

TEST_CASE("debt ratio re-expresses a solved state") {
  FitConfig cfg;
  auto s = solve_shifted(0.1, 0.2, cfg);
  CHECK(s.condensed_shifted == doctest::Approx(0.5).epsilon(1e-3));
  auto d = at_lambda(s, 0.5);
  d.validate(1e-8);
  CHECK(d.condensed_fraction == doctest::Approx(0.75).epsilon(1e-3));
  CHECK(code_of([&] { at_lambda(s, 1.5); }) == Errc::infeasible);

  // same as solving the debt society directly
  auto p = ModelParams::make(0.2, 0.5, cfg.n_agents, static_cast<double>(cfg.n_agents));
  auto direct = steady_state(p, RedistributionPolicy::flat(0.1), cfg.solver).distribution;
  CHECK(gini(model_lorenz(d)) == doctest::Approx(gini(model_lorenz(direct))).epsilon(1e-3));
}

TEST_CASE("small fit is independent of the job count") {
  FitConfig cfg;
  cfg.starts = 2;
  cfg.max_evaluations = 30;
  cfg.lambda_scan = 11;
  cfg.solver.grid.nodes = 400;
  auto data = sample_lorenz(model_lorenz(0.5, 0.6, 0.3, cfg), 100);
  auto a = fit(data, cfg);
  cfg.jobs = 2;
  auto b = fit(data, cfg);
  CHECK(fit_result_json(a) == fit_result_json(b));
  CHECK(a.j < 1e-2);
}

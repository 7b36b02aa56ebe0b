// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "awm/fokker_planck.hpp"
#include "awm/model.hpp"

namespace awm {

/// Points (F_j, l_j) with F strictly increasing and ending at (1, 1). The
/// origin is implied.
struct EmpiricalLorenz {
  LorenzCurve points;
  std::string source;
  bool weighted = true;

  void validate() const;
};

/// Survey records sorted by wealth; F and l are cumulative weighted sums.
/// `lines` (optional) carries source line numbers for diagnostics.
EmpiricalLorenz survey_lorenz(const std::vector<double>& wealth, const std::vector<double>& weight,
                              const std::vector<std::size_t>& lines = {}, const std::string& source = "");
/// CSV `wealth,weight`.
EmpiricalLorenz load_survey(const std::string& path);
/// CSV `F,L`.
EmpiricalLorenz load_lorenz_points(const std::string& path);

/// L1 distance on [0, 1]; both curves are piecewise linear with the origin
/// prepended when absent. At vertical segments the left limit is used.
double discrepancy(const LorenzCurve& a, const LorenzCurve& b);
double discrepancy(const EmpiricalLorenz& empirical, const LorenzCurve& model);

/// Shortest distance from the point to the polyline.
double local_error(const LorenzPoint& point, const LorenzCurve& model);
std::vector<double> local_errors(const EmpiricalLorenz& empirical, const LorenzCurve& model);

/// Left-limit value of a Lorenz polyline at F.
double lorenz_value(const LorenzCurve& curve, double f);

/// Lorenz curve of a steady state including the terminal segment (1, 1-c) -> (1, 1).
LorenzCurve model_lorenz(const WealthDistribution& dist);

/// Samples a model curve at F = j/count (j = 1..count-1) and closes it at (1, 1).
EmpiricalLorenz sample_lorenz(const LorenzCurve& model, int count, const std::string& source = "synthetic");

struct SearchBox {
  double chi_min = 1e-3;
  double chi_max = 4.0;
  double zeta_min = 1e-3;
  double zeta_max = 4.0;
  double lambda_min = 0.0;
  double lambda_max = 2.0;

  void validate() const;
};

struct FitConfig {
  SearchBox box;
  int starts = 6;
  int max_evaluations = 150;
  double simplex_tol = 1e-4;
  std::uint64_t seed = 1;
  int jobs = 1;
  int lambda_scan = 41;
  std::int64_t n_agents = 10000;
  SolverConfig solver;
};

struct StartTrace {
  double chi_start = 0.0;
  double zeta_start = 0.0;
  double chi = 0.0;
  double zeta = 0.0;
  double lambda = 0.0;
  double j = 0.0;
  int evaluations = 0;
  int failures = 0;
  std::string last_error;
};

struct FitResult {
  double chi = 0.0;
  double zeta = 0.0;
  double lambda = 0.0;
  double j = 0.0;
  double gini = 0.0;
  double avg_local_error = 0.0;
  double criticality_ratio = 0.0;
  double oligarch_c = 0.0;
  bool boundary_hit = false;
  std::vector<std::string> boundary_parameters;
  int evaluations = 0;
  int failed_evaluations = 0;
  std::vector<StartTrace> starts;
  std::string source;
  std::uint64_t seed = 0;
};

/// Steady state of the flat model at (chi, zeta) in units with mu_bar = 1 and lambda = 0.
struct ShiftedSolution {
  WealthDistribution dist;
  double condensed_shifted = 0.0;
};

ShiftedSolution solve_shifted(double chi, double zeta, const FitConfig& config);
/// Re-expresses a shifted solution at debt ratio lambda; infeasible when (1+lambda) c > 1.
WealthDistribution at_lambda(const ShiftedSolution& s, double lambda);
/// Model curve at theta; runs the solver.
LorenzCurve model_lorenz(double chi, double zeta, double lambda, const FitConfig& config);

FitResult fit(const EmpiricalLorenz& empirical, const FitConfig& config);

std::string fit_result_json(const FitResult& r);
FitResult parse_fit_result(const std::string& json);

struct CriticalityRow {
  std::string label;
  double chi = 0.0;
  double zeta = 0.0;
  double lambda = 0.0;
  double gini = 0.0;
  double avg_local_error = 0.0;
};

/// label,chi_opt,zeta_opt,lambda_opt,G_fit,avg_local_error_pct with three decimals
/// (two for the percentage), in input order.
std::string criticality_table_csv(const std::vector<CriticalityRow>& rows);
/// Two columns zeta_opt,chi_opt.
std::string criticality_scatter_csv(const std::vector<CriticalityRow>& rows);
/// The chi = zeta line from the origin past the largest parameter.
std::string reference_line_csv(const std::vector<CriticalityRow>& rows);

}  // namespace awm

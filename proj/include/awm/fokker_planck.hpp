// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "awm/model.hpp"

namespace awm {

/// Shifted-frame grid: a uniform core on [0, x_core] followed by geometric
/// spacing up to x_max. Both extents are in units of the shifted mean.
struct GridSpec {
  int nodes = 2000;
  double x_max = 1e4;
  double x_core = 1e-3;
};

std::vector<double> make_shifted_grid(const GridSpec& spec, double mu_bar);

enum class Stepping { implicit, explicit_euler };
enum class FluxScheme { chang_cooper, upwind };

struct SolverConfig {
  GridSpec grid;
  Stepping stepping = Stepping::implicit;
  FluxScheme flux = FluxScheme::chang_cooper;
  double dt = 1.0;
  double dt_initial = 1e-2;
  double dt_growth = 1.1;
  double cfl_safety = 0.9;
  std::int64_t max_steps = 100000;
  double steady_tol = 1e-9;
  int polish_sweeps = 10;
};

struct SteadyStateReport {
  WealthDistribution distribution;
  double residual = 0.0;
  double condensed_flux_total = 0.0;
  double time = 0.0;
  std::int64_t steps = 0;
  bool converged = false;
};

/// Truncated exponential in the shifted frame with exact discrete moments and
/// the given condensed share of W.
WealthDistribution initial_distribution(const ModelParams& params, const GridSpec& grid, double condensed = 0.0);

/// Largest explicit step that keeps the update positive on this state.
double explicit_step_bound(const WealthDistribution& dist, const ModelParams& params,
                           const RedistributionPolicy& policy, const SolverConfig& config);

WealthDistribution evolve(const WealthDistribution& dist, const ModelParams& params,
                          const RedistributionPolicy& policy, const SolverConfig& config, double t_final);

SteadyStateReport steady_state(const ModelParams& params, const RedistributionPolicy& policy,
                               const SolverConfig& config, const WealthDistribution* initial = nullptr);

/// Flux defect sum_i |J_{i+1/2}| dx_i / (N mu_bar) over interior interfaces,
/// with the drift offset first re-solved so the bulk balances the condensate's
/// wealth exchange.
double residual(const WealthDistribution& dist, const ModelParams& params, const RedistributionPolicy& policy);

}  // namespace awm

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "awm/fokker_planck.hpp"
#include "awm/model.hpp"
#include "awm/rng.hpp"

namespace awm {

struct AgentEnsemble {
  std::vector<double> wealths;
  std::int64_t epoch = 0;
};

/// Every agent holds the mean wealth W/N.
AgentEnsemble equal_ensemble(const ModelParams& params);
/// Shifted wealths drawn from an exponential with mean mu_bar, rescaled so
/// the total is exactly W.
AgentEnsemble exponential_ensemble(const ModelParams& params, Rng& rng);

struct SimConfig {
  double dt = 0.01;
  std::int64_t sweeps = 1000;
  std::uint64_t seed = 1;
  std::int64_t snapshot_stride = 100;
  GridSpec histogram_grid{400, 1e4, 1e-3};
  bool keep_snapshots = false;
  // Snapshots from this sweep on are averaged into RunResult::averaged.
  std::int64_t average_from = -1;
  // Cap dt so that a biased stake never exceeds this fraction of the poorer
  // agent's shifted wealth; <= 0 disables the cap.
  double max_stake_fraction = 0.1;
  // When |E[eta]| > 1 scale the stake by |E[eta]| instead of dropping the excess.
  bool bias_overflow = true;
};

struct SweepDiagnostics {
  double wealth_drift = 0.0;
  double dt_used = 0.0;
  std::int64_t clamp_count = 0;
  std::int64_t floor_repairs = 0;
};

struct TransactionCounters {
  std::int64_t clamps = 0;
  std::int64_t repairs = 0;
};

/// One pairwise exchange in the shifted frame. `u` in [0, 1) decides the
/// winner: agent a wins when u < P(eta = +1).
void transact(double& wa, double& wb, double delta, double mu_bar, double zeta, double dt, double u,
              bool bias_overflow, TransactionCounters& counters);

SweepDiagnostics sweep(AgentEnsemble& ensemble, const ModelParams& params, const RedistributionPolicy& policy,
                       const SimConfig& config, Rng& rng);

struct TrajectoryRow {
  std::int64_t sweep = 0;
  double time = 0.0;
  double gini = 0.0;
  double top1_share = 0.0;
  double top10_share = 0.0;
  double total_wealth = 0.0;
};

struct Snapshot {
  std::int64_t sweep = 0;
  WealthDistribution distribution;
};

struct RunResult {
  std::vector<TrajectoryRow> trajectory;
  std::vector<Snapshot> snapshots;
  WealthDistribution averaged;
  std::int64_t averaged_count = 0;
  AgentEnsemble final_state;
  double time = 0.0;
  double max_wealth_drift = 0.0;
  std::int64_t clamp_count = 0;
  std::int64_t floor_repairs = 0;
};

RunResult run(const SimConfig& config, const ModelParams& params, const RedistributionPolicy& policy,
              AgentEnsemble initial);

TrajectoryRow summarize(const AgentEnsemble& ensemble, const ModelParams& params);

/// Agents whose shifted wealth exceeds 100/N of the shifted total.
std::vector<std::size_t> oligarchs(const AgentEnsemble& ensemble, const ModelParams& params);

/// Cloud-in-cell deposit on an AWM grid starting at -Delta. Oligarchs are
/// booked into condensed_fraction and their head count sits at -Delta.
WealthDistribution histogram(const AgentEnsemble& ensemble, const ModelParams& params,
                             const std::vector<double>& grid);

/// Agent fraction per bin [edges[k], edges[k+1]) in AWM wealth.
std::vector<double> bin_fractions(const WealthDistribution& dist, const std::vector<double>& edges);

double l1_distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace awm

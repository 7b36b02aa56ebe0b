// SPDX-License-Identifier: Apache-2.0
#include "awm/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "awm/error.hpp"

namespace awm {

namespace {

// Neumaier compensated sum.
double exact_sum(const std::vector<double>& v) {
  double s = 0.0, c = 0.0;
  for (double x : v) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

void check_ensemble(const AgentEnsemble& e, const ModelParams& p) {
  require(static_cast<std::int64_t>(e.wealths.size()) == p.n_agents, Errc::argument,
          "ensemble size does not match n_agents");
  const double floor = -p.delta();
  for (double w : e.wealths)
    require(std::isfinite(w) && w >= floor - 1e-12 * p.mu_bar(), Errc::argument, "ensemble agent below -Delta");
}

}  // namespace

AgentEnsemble equal_ensemble(const ModelParams& params) {
  params.validate();
  AgentEnsemble e;
  e.wealths.assign(static_cast<std::size_t>(params.n_agents), params.mu());
  return e;
}

AgentEnsemble exponential_ensemble(const ModelParams& params, Rng& rng) {
  params.validate();
  const std::size_t n = static_cast<std::size_t>(params.n_agents);
  std::vector<double> x(n);
  for (auto& v : x) v = -std::log1p(-rng.uniform());
  double total = exact_sum(x);
  const double wbar = params.mu_bar() * static_cast<double>(n);
  AgentEnsemble e;
  e.wealths.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.wealths[i] = x[i] * (wbar / total) - params.delta();
  return e;
}

void transact(double& wa, double& wb, double delta, double mu_bar, double zeta, double dt, double u,
              bool bias_overflow, TransactionCounters& counters) {
  const double xa = wa + delta;
  const double xb = wb + delta;
  const double root = std::sqrt(dt);
  double stake = root * std::min(xa, xb);
  const double bias = zeta * root * (xa - xb) / mu_bar;
  bool a_wins;
  if (std::abs(bias) <= 1.0) {
    a_wins = u < 0.5 * (1.0 + bias);
  } else {
    ++counters.clamps;
    a_wins = bias > 0.0;
    if (bias_overflow) stake = std::min(std::abs(bias) * stake, std::min(xa, xb));
  }
  double& winner = a_wins ? wa : wb;
  double& loser = a_wins ? wb : wa;
  winner += stake;
  loser -= stake;
  if (loser < -delta) {
    winner -= -delta - loser;
    loser = -delta;
    ++counters.repairs;
  }
}

SweepDiagnostics sweep(AgentEnsemble& ensemble, const ModelParams& params, const RedistributionPolicy& policy,
                       const SimConfig& config, Rng& rng) {
  auto& w = ensemble.wealths;
  const std::size_t n = w.size();
  require(n >= 2, Errc::argument, "sweep needs at least two agents");
  require(config.dt > 0.0 && std::isfinite(config.dt), Errc::argument, "sweep: dt must be > 0");
  const double delta = params.delta();
  const double mubar = params.mu_bar();
  const double zeta = params.zeta;
  SweepDiagnostics diag;
  const double before = exact_sum(w);

  double dt = config.dt;
  if (config.max_stake_fraction > 0.0 && zeta > 0.0) {
    double xmax = *std::max_element(w.begin(), w.end()) + delta;
    if (xmax > 0.0) dt = std::min(dt, config.max_stake_fraction * mubar / (zeta * xmax));
  }
  diag.dt_used = dt;

  // Redistribution on pre-transaction wealth.
  std::vector<double> pay(n);
  const bool flat = policy.is_flat();
  const double chi_flat = flat ? policy(0.0) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double chi = flat ? chi_flat : policy.eval(w[i], delta);
    if (chi * dt > 1.0)
      fail(Errc::step_size, "redistribution chi*dt=" + std::to_string(chi * dt) + " > 1 would breach the debt limit");
    pay[i] = chi * (w[i] + delta) * dt;
  }
  const double share = exact_sum(pay) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) w[i] += share - pay[i];

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

  TransactionCounters counters;
  std::int64_t repairs = 0;
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    double& a = w[perm[k]];
    double& b = w[perm[k + 1]];
    double u = rng.uniform();
    transact(a, b, delta, mubar, zeta, dt, u, config.bias_overflow, counters);
  }
  for (double& v : w) {
    if (v < -delta) {
      v = -delta;
      ++repairs;
    }
  }
  diag.clamp_count = counters.clamps;
  diag.floor_repairs = repairs + counters.repairs;
  const double after = exact_sum(w);
  diag.wealth_drift = std::abs(after - before) / std::abs(params.total_wealth);
  ++ensemble.epoch;
  return diag;
}

TrajectoryRow summarize(const AgentEnsemble& ensemble, const ModelParams& params) {
  (void)params;
  std::vector<double> s(ensemble.wealths);
  TrajectoryRow row;
  row.sweep = ensemble.epoch;
  row.total_wealth = exact_sum(s);
  const std::size_t n = s.size();
  std::size_t top = std::max<std::size_t>(1, (n + 9) / 10);
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n - top), s.end());
  double topsum = 0.0;
  for (std::size_t i = n - top; i < n; ++i) topsum += s[i];
  double mx = *std::max_element(s.begin() + static_cast<std::ptrdiff_t>(n - top), s.end());
  row.top1_share = mx / row.total_wealth;
  row.top10_share = topsum / row.total_wealth;
  row.gini = gini(std::move(s));
  return row;
}

std::vector<std::size_t> oligarchs(const AgentEnsemble& ensemble, const ModelParams& params) {
  const double delta = params.delta();
  const double n = static_cast<double>(ensemble.wealths.size());
  const double wbar = params.mu_bar() * n;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ensemble.wealths.size(); ++i)
    if ((ensemble.wealths[i] + delta) / wbar > 100.0 / n) out.push_back(i);
  return out;
}

WealthDistribution histogram(const AgentEnsemble& ensemble, const ModelParams& params,
                             const std::vector<double>& grid) {
  require(grid.size() >= 2, Errc::argument, "histogram: grid needs at least two nodes");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], Errc::argument, "histogram: grid must be strictly increasing");
  const double delta = params.delta();
  require(std::abs(grid.front() + delta) <= 1e-12 * std::max(1.0, delta), Errc::argument,
          "histogram: grid must start at -Delta");
  const std::size_t m = grid.size();
  std::vector<double> mass(m, 0.0);
  std::vector<char> olig(ensemble.wealths.size(), 0);
  for (std::size_t i : oligarchs(ensemble, params)) olig[i] = 1;
  double condensed = 0.0;
  for (std::size_t i = 0; i < ensemble.wealths.size(); ++i) {
    double w = ensemble.wealths[i];
    if (olig[i]) {
      condensed += w + delta;
      mass[0] += 1.0;
      continue;
    }
    if (w < grid.front() - 1e-12 * std::max(1.0, delta) || w > grid.back())
      fail(Errc::range, "histogram: agent wealth " + std::to_string(w) + " outside the grid");
    w = std::max(w, grid.front());
    auto it = std::upper_bound(grid.begin(), grid.end(), w);
    std::size_t j = static_cast<std::size_t>(it - grid.begin());
    if (j >= m) {
      mass[m - 1] += 1.0;
      continue;
    }
    --j;
    double t = (w - grid[j]) / (grid[j + 1] - grid[j]);
    mass[j] += 1.0 - t;
    mass[j + 1] += t;
  }
  auto h = trapezoid_weights(grid);
  WealthDistribution d;
  d.grid = grid;
  d.grid.front() = -delta;
  d.density.resize(m);
  for (std::size_t i = 0; i < m; ++i) d.density[i] = mass[i] / h[i];
  d.n_agents = static_cast<double>(ensemble.wealths.size());
  d.total_wealth = params.total_wealth;
  d.lambda = params.lambda;
  d.condensed_fraction = std::clamp(condensed / params.total_wealth, 0.0, 1.0);
  return d;
}

std::vector<double> bin_fractions(const WealthDistribution& dist, const std::vector<double>& edges) {
  require(edges.size() >= 2, Errc::argument, "bin_fractions: need at least two edges");
  const auto& g = dist.grid;
  const auto& p = dist.density;
  std::vector<double> cum(g.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) cum[i] = cum[i - 1] + 0.5 * (p[i - 1] + p[i]) * (g[i] - g[i - 1]);
  auto count_below = [&](double w) {
    if (w <= g.front()) return 0.0;
    if (w >= g.back()) return cum.back();
    std::size_t j = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), w) - g.begin()) - 1;
    double t = (w - g[j]) / (g[j + 1] - g[j]);
    double pw = p[j] + t * (p[j + 1] - p[j]);
    return cum[j] + 0.5 * (p[j] + pw) * (w - g[j]);
  };
  std::vector<double> out(edges.size() - 1);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    out[k] = (count_below(edges[k + 1]) - count_below(edges[k])) / dist.n_agents;
  return out;
}

double l1_distance(const std::vector<double>& p, const std::vector<double>& q) {
  require(p.size() == q.size(), Errc::argument, "l1_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

RunResult run(const SimConfig& config, const ModelParams& params, const RedistributionPolicy& policy,
              AgentEnsemble initial) {
  params.validate();
  require(config.sweeps >= 1, Errc::argument, "run: sweeps must be >= 1");
  require(config.snapshot_stride >= 1, Errc::argument, "run: snapshot_stride must be >= 1");
  check_ensemble(initial, params);
  RunResult r;
  Rng rng(config.seed);
  AgentEnsemble e = std::move(initial);
  auto grid = make_shifted_grid(config.histogram_grid, params.mu_bar());
  for (double& v : grid) v -= params.delta();
  grid.front() = -params.delta();
  auto record = [&](double t) {
    TrajectoryRow row = summarize(e, params);
    row.time = t;
    r.trajectory.push_back(row);
    const bool averaging = config.average_from >= 0 && e.epoch >= config.average_from;
    if (!config.keep_snapshots && !averaging) return;
    WealthDistribution h = histogram(e, params, grid);
    if (averaging) {
      if (r.averaged_count == 0) {
        r.averaged = h;
      } else {
        for (std::size_t i = 0; i < h.density.size(); ++i) r.averaged.density[i] += h.density[i];
        r.averaged.condensed_fraction += h.condensed_fraction;
      }
      ++r.averaged_count;
    }
    if (config.keep_snapshots) r.snapshots.push_back({e.epoch, std::move(h)});
  };
  double t = 0.0;
  record(t);
  for (std::int64_t s = 1; s <= config.sweeps; ++s) {
    SweepDiagnostics d = sweep(e, params, policy, config, rng);
    t += d.dt_used;
    r.max_wealth_drift = std::max(r.max_wealth_drift, d.wealth_drift);
    r.clamp_count += d.clamp_count;
    r.floor_repairs += d.floor_repairs;
    if (s % config.snapshot_stride == 0 || s == config.sweeps) record(t);
  }
  if (r.averaged_count > 0) {
    double k = static_cast<double>(r.averaged_count);
    for (double& v : r.averaged.density) v /= k;
    r.averaged.condensed_fraction /= k;
  }
  r.time = t;
  r.final_state = std::move(e);
  return r;
}

}  // namespace awm

// SPDX-License-Identifier: Apache-2.0
#include "awm/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "awm/error.hpp"

namespace awm {

namespace {

double bernoulli(double z) {
  double az = std::abs(z);
  if (az < 1e-6) return 1.0 - 0.5 * z + z * z / 12.0;
  if (z > 700.0) return z * std::exp(-z);
  return z / std::expm1(z);
}

// Solver state in the shifted frame x = w + Delta.
class Engine {
 public:
  Engine(const WealthDistribution& dist, const ModelParams& params, const RedistributionPolicy& policy,
         const SolverConfig& cfg)
      : cfg_(cfg) {
    params.validate();
    dist.validate();
    require(std::abs(dist.n_agents - static_cast<double>(params.n_agents)) <= 1e-9 * dist.n_agents &&
                std::abs(dist.total_wealth - params.total_wealth) <= 1e-9 * dist.total_wealth &&
                std::abs(dist.lambda - params.lambda) <= 1e-12,
            Errc::argument, "distribution does not match model parameters");
    delta_ = params.delta();
    n_ = dist.n_agents;
    wbar_ = params.total_wealth + n_ * delta_;
    mubar_ = wbar_ / n_;
    zeta_ = params.zeta;
    total_wealth_ = params.total_wealth;
    lambda_ = params.lambda;
    m_ = dist.size();
    x_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) x_[i] = dist.grid[i] + delta_;
    x_[0] = 0.0;
    h_ = trapezoid_weights(x_);
    dx_.resize(m_ - 1);
    for (std::size_t i = 0; i + 1 < m_; ++i) dx_[i] = x_[i + 1] - x_[i];
    chi_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) chi_[i] = policy.eval(x_[i] - delta_, delta_);
    chi_top_ = chi_.back();
    p_ = dist.density;
    cbar_ = dist.condensed_fraction * total_wealth_ / wbar_;
    a_.resize(m_);
    b_.resize(m_);
    l_.resize(m_);
    v_.resize(m_);
    dd_.resize(m_);
    fa_.resize(m_ - 1);
    fb_.resize(m_ - 1);
    ratio_.resize(m_ - 1);
  }

  // Drift and diffusion at nodes from the current density.
  void coefficients() {
    double tail = 0.0;
    a_[m_ - 1] = 0.0;
    for (std::size_t i = m_ - 1; i-- > 0;) {
      tail += 0.5 * (p_[i] + p_[i + 1]) * dx_[i];
      a_[i] = tail / n_;
    }
    double ls = 0.0, bs = 0.0, t = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i > 0) {
        double x0 = x_[i - 1], x1 = x_[i];
        ls += 0.5 * (p_[i - 1] * x0 + p_[i] * x1) * dx_[i - 1];
        bs += 0.25 * (p_[i - 1] * x0 * x0 + p_[i] * x1 * x1) * dx_[i - 1];
      }
      l_[i] = ls / wbar_;
      b_[i] = bs / n_;
      t += h_[i] * chi_[i] * x_[i] * p_[i];
    }
    t += chi_top_ * cbar_ * wbar_;
    t_ = t;
    for (std::size_t i = 0; i < m_; ++i) {
      double x = x_[i];
      double xa = x * x * a_[i] * 0.5;
      double sigma = t_ / n_ - chi_[i] * x - zeta_ * ((2.0 / mubar_) * (b_[i] - xa) + (1.0 - 2.0 * l_[i]) * x);
      v_[i] = sigma - x * a_[i];
      dd_[i] = b_[i] + xa;
    }
    fluxes(s_);
  }

  // Interface weights with a constant drift offset added to the node drift.
  void fluxes(double offset) {
    for (std::size_t i = 0; i + 1 < m_; ++i) {
      double v = 0.5 * (v_[i] + v_[i + 1]) + offset;
      double d = 0.5 * (dd_[i] + dd_[i + 1]);
      double dx = dx_[i];
      if (cfg_.flux == FluxScheme::upwind || d <= 1e-300) {
        fa_[i] = std::max(v, 0.0) + d / dx;
        fb_[i] = std::max(-v, 0.0) + d / dx;
        ratio_[i] = std::log(fa_[i]) - std::log(fb_[i]);
      } else {
        double z = v * dx / d;
        fa_[i] = d / dx * bernoulli(-z);
        fb_[i] = d / dx * bernoulli(z);
        ratio_[i] = z;
      }
    }
    out_ = std::max(v_[m_ - 1] + offset, 0.0);
  }

  double cfl_bound() const {
    double bound = 1e300;
    for (std::size_t i = 0; i < m_; ++i) {
      double rate = 0.0;
      if (i + 1 < m_) rate += fa_[i];
      if (i > 0) rate += fb_[i - 1];
      if (i + 1 == m_) rate += out_;
      if (rate > 0.0) bound = std::min(bound, h_[i] / rate);
    }
    return cfg_.cfl_safety * bound;
  }

  // One step of size dt; returns the relative L1 change (density and c).
  double step(double dt) {
    coefficients();
    old_ = p_;
    const double cbar0 = cbar_;
    if (cfg_.stepping == Stepping::explicit_euler) {
      double bound = cfl_bound();
      if (dt > bound)
        fail(Errc::step_size, "explicit step dt=" + std::to_string(dt) + " exceeds stability bound " +
                                  std::to_string(bound));
      std::vector<double>& np = scratch_;
      np.assign(m_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) {
        double jr = i + 1 < m_ ? fa_[i] * old_[i] - fb_[i] * old_[i + 1] : out_ * old_[i];
        double jl = i > 0 ? fa_[i - 1] * old_[i - 1] - fb_[i - 1] * old_[i] : 0.0;
        np[i] = old_[i] - dt / h_[i] * (jr - jl);
      }
      p_.swap(np);
      escaped_ = dt * out_ * old_[m_ - 1];
    } else {
      solve_implicit(dt);
      escaped_ = dt * out_ * p_[m_ - 1];
    }
    double pmax = *std::max_element(p_.begin(), p_.end());
    for (double& v : p_) {
      if (v < 0.0) {
        if (v < -1e-12 * pmax) fail(Errc::discretization, "negative density produced by the update");
        v = 0.0;
      }
    }
    s_ += balance_wealth(dt, cbar0);
    double nb = 0.0, wb = 0.0;
    for (std::size_t i = 0; i < m_; ++i) nb += h_[i] * p_[i];
    double scale = n_ / nb;
    for (std::size_t i = 0; i < m_; ++i) {
      p_[i] *= scale;
      wb += h_[i] * p_[i] * x_[i];
    }
    double c = 1.0 - wb / wbar_;
    if (c < 0.0) {
      if (c < -1e-9) fail(Errc::discretization, "bulk wealth exceeds total wealth");
      c = 0.0;
    }
    flux_total_ += escaped_ * x_[m_ - 1] / wbar_;
    cbar_ = c;
    double change = 0.0;
    for (std::size_t i = 0; i < m_; ++i) change += h_[i] * std::abs(p_[i] - old_[i]);
    return change / n_ + std::abs(cbar_ - cbar0);
  }

  // Zero-flux profile for the current potentials with drift offset `offset`;
  // returns the bulk shifted wealth and leaves the profile in scratch_.
  double zero_flux_profile(double offset) {
    fluxes(offset);
    std::vector<double>& lp = scratch_;
    lp.assign(m_, 0.0);
    double top = 0.0;
    // P_{i+1} / P_i = fa_i / fb_i for a vanishing interface flux.
    for (std::size_t i = 0; i + 1 < m_; ++i) {
      lp[i + 1] = lp[i] + ratio_[i];
      top = std::max(top, lp[i + 1]);
    }
    double nb = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      lp[i] = std::exp(lp[i] - top);
      nb += h_[i] * lp[i];
    }
    double wb = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      lp[i] *= n_ / nb;
      wb += h_[i] * lp[i] * x_[i];
    }
    return wb;
  }

  // Picard sweeps on the first integral of the steady equation (zero flux)
  // with the condensed share held fixed.
  bool polish(int sweeps) {
    const double want = wbar_ * (1.0 - cbar_);
    const std::vector<double> keep_p = p_;
    const double keep_s = s_;
    for (int k = 0; k < sweeps; ++k) {
      coefficients();
      double s0 = s_, f0 = zero_flux_profile(s0) - want;
      double s1 = s_ + 1e-4 * mubar_ * (f0 > 0.0 ? -1.0 : 1.0);
      double f1 = zero_flux_profile(s1) - want;
      for (int it = 0; it < 50 && f1 != f0; ++it) {
        double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = zero_flux_profile(s1) - want;
        if (std::abs(f1) <= 1e-14 * want) break;
      }
      double wb = zero_flux_profile(s1);
      if (!std::isfinite(wb) || std::abs(wb - want) > 1e-10 * wbar_ || scratch_[m_ - 1] > 1e-12 * n_ / mubar_) {
        p_ = keep_p;
        s_ = keep_s;
        return false;
      }
      p_ = scratch_;
      s_ = s1;
    }
    double wb = 0.0;
    for (std::size_t i = 0; i < m_; ++i) wb += h_[i] * p_[i] * x_[i];
    cbar_ = std::max(0.0, 1.0 - wb / wbar_);
    return true;
  }

  // Wealth moved across interior interfaces per unit time.
  double moved() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < m_; ++i) m += (fa_[i] * p_[i] - fb_[i] * p_[i + 1]) * dx_[i];
    return m - out_ * p_[m_ - 1] * x_[m_ - 1];
  }

  // The constant part of the drift is closed by the discrete wealth balance,
  // the same closure the stepper converges to.
  double residual_now() {
    coefficients();
    const double target = cbar_ * wbar_ * (chi_top_ - zeta_ * (1.0 - cbar_)) - out_ * p_[m_ - 1] * x_[m_ - 1];
    double s0 = s_, f0 = moved() - target;
    double s1 = s_ + 1e-6 * mubar_;
    fluxes(s1);
    double f1 = moved() - target;
    for (int it = 0; it < 30 && f1 != f0; ++it) {
      double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
      s0 = s1;
      f0 = f1;
      s1 = s2;
      fluxes(s1);
      f1 = moved() - target;
      if (std::abs(s1 - s0) <= 1e-15 * mubar_) break;
    }
    double r = 0.0;
    for (std::size_t i = 0; i + 1 < m_; ++i) r += std::abs(fa_[i] * p_[i] - fb_[i] * p_[i + 1]) * dx_[i];
    fluxes(s_);
    return r / (n_ * mubar_);
  }

  WealthDistribution distribution() const {
    WealthDistribution d;
    d.grid.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) d.grid[i] = x_[i] - delta_;
    d.grid[0] = -delta_;
    d.density = p_;
    d.n_agents = n_;
    d.total_wealth = total_wealth_;
    d.lambda = lambda_;
    double wb = 0.0;
    for (std::size_t i = 0; i < m_; ++i) wb += h_[i] * p_[i] * d.grid[i];
    d.condensed_fraction = std::clamp(1.0 - wb / total_wealth_, 0.0, 1.0);
    return d;
  }

  double condensed_flux_total() const { return flux_total_ * wbar_ / total_wealth_; }

 private:
  void solve_implicit(double dt) {
    // Tridiagonal system h_i/dt P_i + J_{i+1/2} - J_{i-1/2} = h_i/dt P_i^n.
    lower_.assign(m_, 0.0);
    diag_.assign(m_, 0.0);
    upper_.assign(m_, 0.0);
    rhs_.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double d = h_[i] / dt;
      if (i + 1 < m_) {
        d += fa_[i];
        upper_[i] = -fb_[i];
      } else {
        d += out_;
      }
      if (i > 0) {
        d += fb_[i - 1];
        lower_[i] = -fa_[i - 1];
      }
      diag_[i] = d;
      rhs_[i] = h_[i] / dt * old_[i];
    }
    for (std::size_t i = 1; i < m_; ++i) {
      double w = lower_[i] / diag_[i - 1];
      diag_[i] -= w * upper_[i - 1];
      rhs_[i] -= w * rhs_[i - 1];
    }
    p_[m_ - 1] = rhs_[m_ - 1] / diag_[m_ - 1];
    for (std::size_t i = m_ - 1; i-- > 0;) p_[i] = (rhs_[i] - upper_[i] * p_[i + 1]) / diag_[i];
  }

  // Uniform upwind drift so bulk wealth changes by exactly the exchange with
  // the condensate minus what escaped through the top. Interfaces too narrow
  // for the explicit drift are skipped, which keeps the density nonnegative.
  double balance_wealth(double dt, double cbar0) {
    double target = dt * cbar0 * wbar_ * (chi_top_ - zeta_ * (1.0 - cbar0)) - escaped_ * x_[m_ - 1];
    double got = 0.0;
    for (std::size_t i = 0; i < m_; ++i) got += h_[i] * x_[i] * (p_[i] - old_[i]);
    double need = target - got;
    if (need == 0.0) return 0.0;
    double ds = 0.0;
    std::vector<char>& on = active_;
    on.assign(m_ - 1, 1);
    for (int pass = 0; pass < 8; ++pass) {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < m_; ++i)
        if (on[i]) s += (need > 0.0 ? p_[i] : p_[i + 1]) * dx_[i];
      if (s <= 0.0) return 0.0;
      ds = need / (dt * s);
      bool changed = false;
      for (std::size_t i = 0; i + 1 < m_; ++i) {
        if (on[i] && dt * std::abs(ds) > 0.5 * dx_[i]) {
          on[i] = 0;
          changed = true;
        }
      }
      if (!changed) break;
    }
    std::vector<double>& g = scratch_;
    g.assign(m_ - 1, 0.0);
    for (std::size_t i = 0; i + 1 < m_; ++i)
      if (on[i] && dt * std::abs(ds) <= 0.5 * dx_[i]) g[i] = ds * (ds > 0.0 ? p_[i] : p_[i + 1]);
    for (std::size_t i = 0; i < m_; ++i) {
      double jr = i + 1 < m_ ? g[i] : 0.0;
      double jl = i > 0 ? g[i - 1] : 0.0;
      p_[i] = std::max(0.0, p_[i] - dt / h_[i] * (jr - jl));
    }
    return ds;
  }

  SolverConfig cfg_;
  double delta_ = 0, n_ = 0, wbar_ = 0, mubar_ = 0, zeta_ = 0, total_wealth_ = 0, lambda_ = 0;
  std::size_t m_ = 0;
  std::vector<double> x_, h_, dx_, chi_, p_, old_, a_, b_, l_, v_, dd_, fa_, fb_, ratio_, scratch_;
  std::vector<double> lower_, diag_, upper_, rhs_;
  std::vector<char> active_;
  double chi_top_ = 0, s_ = 0, cbar_ = 0, t_ = 0, out_ = 0, escaped_ = 0, flux_total_ = 0;
};

void check_config(const SolverConfig& c) {
  require(c.grid.nodes >= 16, Errc::argument, "solver: grid needs at least 16 nodes");
  require(c.grid.x_max > c.grid.x_core && c.grid.x_core > 0.0, Errc::argument, "solver: need 0 < x_core < x_max");
  require(c.dt > 0.0 && std::isfinite(c.dt), Errc::argument, "solver: dt must be > 0");
  require(c.dt_initial > 0.0 && c.dt_growth >= 1.0, Errc::argument, "solver: bad step ramp");
  require(c.max_steps >= 1, Errc::argument, "solver: max_steps must be >= 1");
  require(c.steady_tol > 0.0, Errc::argument, "solver: steady_tol must be > 0");
  require(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0, Errc::argument, "solver: cfl_safety must be in (0, 1]");
}

}  // namespace

std::vector<double> make_shifted_grid(const GridSpec& spec, double mu_bar) {
  require(spec.nodes >= 16, Errc::argument, "grid needs at least 16 nodes");
  require(spec.x_core > 0.0 && spec.x_max > spec.x_core, Errc::argument, "grid needs 0 < x_core < x_max");
  const int n = spec.nodes;
  const double span = std::log(spec.x_max / spec.x_core);
  int ncore = 1;
  for (; ncore < n - 8; ++ncore) {
    double r = std::exp(span / (n - ncore - 1));
    if (std::lround(1.0 / (r - 1.0)) <= ncore) break;
  }
  const int nlog = n - ncore;
  std::vector<double> x;
  x.reserve(n);
  for (int k = 0; k < ncore; ++k) x.push_back(mu_bar * spec.x_core * k / ncore);
  for (int j = 0; j < nlog; ++j) x.push_back(mu_bar * spec.x_core * std::exp(span * j / (nlog - 1)));
  x.back() = mu_bar * spec.x_max;
  return x;
}

WealthDistribution initial_distribution(const ModelParams& params, const GridSpec& grid, double condensed) {
  params.validate();
  require(std::isfinite(condensed) && condensed >= 0.0 && condensed < 1.0, Errc::argument,
          "initial condensed fraction must lie in [0, 1)");
  const double seed_share = condensed * params.total_wealth / (params.total_wealth + params.n_agents * params.delta());
  const double mubar = params.mu_bar() * (1.0 - seed_share);
  const double n = static_cast<double>(params.n_agents);
  auto x = make_shifted_grid(grid, params.mu_bar());
  auto h = trapezoid_weights(x);
  auto moments = [&](double scale, double& z, double& mean) {
    z = 0.0;
    mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double e = std::exp(-x[i] / scale);
      z += h[i] * e;
      mean += h[i] * e * x[i];
    }
    mean /= z;
  };
  double lo = 0.5 * mubar, hi = 2.0 * mubar, z = 0.0, mean = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    moments(mid, z, mean);
    if (mean < mubar) lo = mid; else hi = mid;
  }
  double scale = 0.5 * (lo + hi);
  moments(scale, z, mean);
  WealthDistribution d;
  d.grid.resize(x.size());
  d.density.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.grid[i] = x[i] - params.delta();
    d.density[i] = n * std::exp(-x[i] / scale) / z;
  }
  d.grid[0] = -params.delta();
  d.n_agents = n;
  d.total_wealth = params.total_wealth;
  d.lambda = params.lambda;
  double wb = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) wb += h[i] * d.density[i] * d.grid[i];
  d.condensed_fraction = std::clamp(1.0 - wb / params.total_wealth, 0.0, 1.0);
  return d;
}

double explicit_step_bound(const WealthDistribution& dist, const ModelParams& params,
                           const RedistributionPolicy& policy, const SolverConfig& config) {
  Engine e(dist, params, policy, config);
  e.coefficients();
  return e.cfl_bound();
}

WealthDistribution evolve(const WealthDistribution& dist, const ModelParams& params,
                          const RedistributionPolicy& policy, const SolverConfig& config, double t_final) {
  check_config(config);
  require(t_final >= 0.0 && std::isfinite(t_final), Errc::argument, "evolve: t_final must be >= 0");
  Engine e(dist, params, policy, config);
  if (config.stepping == Stepping::explicit_euler) {
    e.coefficients();
    double bound = e.cfl_bound();
    if (config.dt > bound)
      fail(Errc::step_size, "explicit dt=" + std::to_string(config.dt) + " exceeds initial stability bound " +
                                std::to_string(bound));
  }
  double t = 0.0;
  while (t < t_final) {
    double dt = std::min(config.dt, t_final - t);
    if (dt <= 1e-15 * std::max(1.0, t_final)) break;
    e.step(dt);
    t += dt;
  }
  return e.distribution();
}

namespace {

// Closed-form share for the asymptotic rate; c = 0 is stationary but
// unstable when chi_inf < zeta.
double seed_condensate(const ModelParams& params, const RedistributionPolicy& policy) {
  double chi = policy.asymptotic();
  if (!std::isfinite(chi) || params.zeta <= 0.0 || chi >= params.zeta) return 0.0;
  double c = (1.0 + params.lambda) * (1.0 - chi / params.zeta);
  return std::clamp(c, 0.0, 0.999);
}

}  // namespace

SteadyStateReport steady_state(const ModelParams& params, const RedistributionPolicy& policy,
                               const SolverConfig& config, const WealthDistribution* initial) {
  check_config(config);
  WealthDistribution start = initial ? *initial : initial_distribution(params, config.grid, seed_condensate(params, policy));
  Engine e(start, params, policy, config);
  SteadyStateReport rep;
  double dt = std::min(config.dt_initial, config.dt);
  if (config.stepping == Stepping::explicit_euler) {
    e.coefficients();
    dt = std::min(config.dt, e.cfl_bound());
  }
  double t = 0.0;
  std::int64_t steps = 0;
  while (steps < config.max_steps) {
    if (config.stepping == Stepping::explicit_euler) {
      e.coefficients();
      dt = std::min(config.dt, e.cfl_bound());
    }
    double change = e.step(dt);
    t += dt;
    ++steps;
    if (change / dt <= config.steady_tol && e.residual_now() <= config.steady_tol) {
      rep.converged = true;
      break;
    }
    if (config.stepping == Stepping::implicit) dt = std::min(config.dt, dt * config.dt_growth);
  }
  // Backward Euler relaxes the far tail slowly; alternate zero-flux polish
  // sweeps with marching until the polished state is itself stationary.
  for (int round = 0; rep.converged && round < config.polish_sweeps; ++round) {
    if (!e.polish(1)) break;
    if (e.residual_now() <= config.steady_tol) break;
    std::int64_t budget = std::max<std::int64_t>(1, config.max_steps - steps);
    for (std::int64_t k = 0; k < budget; ++k) {
      double change = e.step(dt);
      t += dt;
      ++steps;
      if (change / dt <= config.steady_tol) break;
    }
  }
  rep.distribution = e.distribution();
  rep.residual = e.residual_now();
  rep.converged = rep.converged && rep.residual <= config.steady_tol;
  rep.condensed_flux_total = e.condensed_flux_total();
  rep.steps = steps;
  rep.time = t;
  return rep;
}

double residual(const WealthDistribution& dist, const ModelParams& params, const RedistributionPolicy& policy) {
  SolverConfig cfg;
  Engine e(dist, params, policy, cfg);
  return e.residual_now();
}

}  // namespace awm

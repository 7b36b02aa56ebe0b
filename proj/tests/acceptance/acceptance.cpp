// SPDX-License-Identifier: Apache-2.0
// Acceptance run. Prints one PASS/FAIL line per criterion (sub-checks carry a
// letter) and exits nonzero when any line fails. Pass criterion numbers as
// arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "awm/asymptotics.hpp"
#include "awm/error.hpp"
#include "awm/fitting.hpp"
#include "awm/fokker_planck.hpp"
#include "awm/kinetics.hpp"
#include "properties.hpp"

using namespace awm;

namespace tol {
constexpr double kCondensate = 0.05;
constexpr double kSubcriticalCondensate = 0.01;
constexpr double kSolveSeconds = 120.0;
constexpr double kQuadratic = 0.10;
constexpr double kMcL1 = 0.05;
constexpr double kMcDrift = 1e-12;
constexpr double kMcSeconds = 300.0;
constexpr double kRoundTrip = 0.01;
constexpr double kMomentFinal = 0.01;
constexpr double kQuadrature = 1e-10;
constexpr double kReduction = 0.05;
constexpr double kFitParam = 0.05;
constexpr double kFitJ = 1e-3;
constexpr double kRatioLo = 0.84;
constexpr double kRatioHi = 1.11;
constexpr double kGini = 0.03;
constexpr double kEpsilon = 0.02;
constexpr double kDominance = 5.0;
}  // namespace tol

namespace {

int failures = 0;

void line(const char* id, bool ok, const std::string& what) {
  std::printf("C%-3s %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...) {
  std::va_list ap;
  va_start(ap, fmt);
  std::printf("      ");
  std::vprintf(fmt, ap);
  std::printf("\n");
  va_end(ap);
}

std::string str(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string str(const char* fmt, ...) {
  char buf[512];
  std::va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Solve {
  SteadyStateReport rep;
  double seconds = 0.0;
};

Solve solve(double chi, double zeta, double lambda) {
  auto p = ModelParams::make(zeta, lambda, 10000, 10000.0);
  auto t0 = std::chrono::steady_clock::now();
  Solve s{steady_state(p, RedistributionPolicy::flat(chi), SolverConfig{}), 0.0};
  s.seconds = seconds_since(t0);
  return s;
}

void phase_transition() {
  struct Row {
    double chi, zeta, lambda, want;
    bool upper_bound;
  };
  const Row rows[] = {{0.1, 0.2, 0.0, 0.5, false}, {0.1, 0.2, 0.5, 0.75, false}, {0.2, 0.1, 0.0, 0.0, true}};
  bool ok = true;
  double slowest = 0.0;
  std::string summary;
  for (const auto& r : rows) {
    auto s = solve(r.chi, r.zeta, r.lambda);
    double c = s.rep.distribution.condensed_fraction;
    bool hit = r.upper_bound ? c <= tol::kSubcriticalCondensate : std::abs(c - r.want) <= tol::kCondensate;
    ok = ok && hit && s.rep.converged && s.seconds <= tol::kSolveSeconds;
    slowest = std::max(slowest, s.seconds);
    info("chi=%.2f zeta=%.2f lambda=%.2f: c=%.6f (%s %.2f) converged=%d residual=%.2e %.2fs", r.chi, r.zeta,
         r.lambda, c, r.upper_bound ? "<=" : "target", r.upper_bound ? tol::kSubcriticalCondensate : r.want,
         s.rep.converged, s.rep.residual, s.seconds);
    summary += str("%.4f ", c);
  }
  line("1", ok, str("phase transition: c = %s(tol %.2f / <= %.2f), slowest solve %.2fs (<= %.0fs)", summary.c_str(),
                    tol::kCondensate, tol::kSubcriticalCondensate, slowest, tol::kSolveSeconds));
}

void critical_tail() {
  struct Case {
    double chi, zeta;
  };
  auto predicted = [](const SteadyStateReport& r, double chi, double zeta) {
    auto pot = compute_potentials(r.distribution, RedistributionPolicy::flat(chi), Frame::shifted);
    return std::abs(chi - zeta) / (2.0 * pot.b_inf);
  };
  bool ok = true;
  double sub_pred = 0.0;
  for (const Case& c : {Case{0.3, 0.1}, Case{0.2, 0.1}}) {
    auto s = solve(c.chi, c.zeta, 0.0);
    auto fit = fit_log_tail(s.rep.distribution);
    double pred = predicted(s.rep, c.chi, c.zeta);
    if (sub_pred == 0.0) sub_pred = pred;
    double rel = std::abs(fit.quadratic / pred - 1.0);
    ok = ok && rel <= tol::kQuadratic;
    info("chi=%.2f zeta=%.2f: fitted %.6g over [%.1f, %.1f], |chi-zeta|/(2 B_inf) %.6g, rel %.3f", c.chi, c.zeta,
         fit.quadratic, fit.x_lo, fit.x_hi, pred, rel);
  }
  double crit_ratio = 0.0;
  for (double z : {0.1, 0.2}) {
    auto s = solve(z, z, 0.0);
    auto fit = fit_log_tail(s.rep.distribution);
    double r = std::abs(fit.quadratic) / sub_pred;
    crit_ratio = std::max(crit_ratio, r);
    ok = ok && r <= tol::kQuadratic;
    info("chi=zeta=%.2f: fitted %.6g over [%.1f, %.1f], %.4f of the subcritical coefficient", z, fit.quadratic,
         fit.x_lo, fit.x_hi, r);
  }
  line("2", ok, str("tail quadratic: non-critical within %.0f%%, critical <= %.0f%% of subcritical (worst %.4f)",
                    100 * tol::kQuadratic, 100 * tol::kQuadratic, crit_ratio));
}

void monte_carlo() {
  struct Regime {
    const char* name;
    double chi, zeta, dt, kappa;
    std::int64_t sweeps;
  };
  const Regime regimes[] = {{"subcritical", 0.2, 0.1, 0.01, 0.1, 5000},
                            {"critical", 0.1, 0.1, 0.02, 0.3, 20000},
                            {"supercritical", 0.1, 0.2, 0.02, 0.3, 200000}};
  bool ok = true;
  std::string summary;
  for (const auto& g : regimes) {
    const std::int64_t n = 10000;
    auto p = ModelParams::make(g.zeta, 0.0, n, static_cast<double>(n));
    auto pol = RedistributionPolicy::flat(g.chi);
    SimConfig sc;
    sc.dt = g.dt;
    sc.max_stake_fraction = g.kappa;
    sc.sweeps = g.sweeps;
    sc.seed = 7;
    sc.snapshot_stride = std::max<std::int64_t>(1, g.sweeps / 200);
    sc.average_from = g.sweeps / 2;
    Rng init(99);
    auto t0 = std::chrono::steady_clock::now();
    auto res = run(sc, p, pol, exponential_ensemble(p, init));
    double secs = seconds_since(t0);
    auto pde = steady_state(p, pol, SolverConfig{}).distribution;
    // 60 equal bins up to the PDE's 99.99% agent quantile plus one overflow bin
    auto h = trapezoid_weights(pde.grid);
    double cum = 0.0, hi = pde.grid.back();
    for (std::size_t i = 0; i < pde.size(); ++i) {
      cum += h[i] * pde.density[i];
      if (cum < 0.9999 * static_cast<double>(n)) hi = pde.grid[i];
    }
    std::vector<double> edges;
    for (int k = 0; k <= 60; ++k) edges.push_back(-p.delta() + (hi + p.delta()) * k / 60.0);
    edges.push_back(std::numeric_limits<double>::max());
    double l1 = l1_distance(bin_fractions(res.averaged, edges), bin_fractions(pde, edges));
    bool hit = l1 <= tol::kMcL1 && res.max_wealth_drift <= tol::kMcDrift && secs <= tol::kMcSeconds;
    ok = ok && hit;
    info("%s chi=%.2f zeta=%.2f: L1=%.4f, MC c=%.4f vs PDE c=%.4f, max drift %.2e, %lld sweeps in %.1fs", g.name,
         g.chi, g.zeta, l1, res.averaged.condensed_fraction, pde.condensed_fraction, res.max_wealth_drift,
         static_cast<long long>(g.sweeps), secs);
    summary += str("%.4f ", l1);
  }
  line("3", ok, str("MC vs PDE: L1 = %s(<= %.2f), drift <= %.0e, <= %.0fs per regime", summary.c_str(), tol::kMcL1,
                    tol::kMcDrift, tol::kMcSeconds));
}

void round_trip() {
  MomentInputs m;
  m.zeta = 0.5;
  m.b_inf = 1.2;
  m.mu_bar = 1.0;
  m.t_over_n = 2.0 * m.zeta * m.b_inf / m.mu_bar;
  const std::vector<TailFunction> tails{TailFunction::exponential(0.8), TailFunction::pareto(1.0),
                                        TailFunction::lognormal(1.0), TailFunction::inverse_gamma(2.0, 3.0),
                                        TailFunction::higher_order_gaussian(2.0, 3.0)};
  // f is known up to an additive constant; both sides are taken relative to a reference wealth
  const double w_ref = 10.0 * m.mu_bar;
  ForwardOptions o;
  o.x_ref = 5.0 * m.mu_bar;
  bool ok = true;
  double worst = 0.0;
  for (const auto& t : tails) {
    auto pol = invert_redistribution(t, m).policy();
    double base = forward_tail(pol, m, w_ref, o);
    for (double k : {1e2, 1e3, 1e4}) {
      double w = k * m.mu_bar;
      double want = t.value(w) - t.value(w_ref);
      double got = forward_tail(pol, m, w, o) - base;
      double rel = std::abs(got / want - 1.0);
      worst = std::max(worst, rel);
      ok = ok && rel <= tol::kRoundTrip;
      info("%-34s w=%-6g f-f(ref)=%.10g forward=%.10g rel %.1e", t.describe().c_str(), w, want, got, rel);
    }
  }
  line("4", ok, str("invert -> forward: worst relative error %.2e (<= %.0e)", worst, tol::kRoundTrip));
}

void moment_ratios() {
  auto t = TailFunction::power_log(0.5, 2.0, 0.0);
  const double c = std::sqrt(M_PI / 2.0);
  bool ok = true;
  for (double m : {0.0, 2.0}) {
    double prev = INFINITY, last = 0.0, oracle_err = 0.0;
    bool monotone = true;
    for (double w : {3.0, 5.0, 10.0, 20.0}) {
      double r = incomplete_moment_ratio(t, m, w);
      // closed forms through erfc for f = w^2/2
      double tail0 = c * std::erfc(w / std::sqrt(2.0)) * std::exp(w * w / 2.0);
      double want = m == 0.0 ? w * tail0 : 1.0 + tail0 / w;
      oracle_err = std::max(oracle_err, std::abs(r / want - 1.0));
      monotone = monotone && std::abs(r - 1.0) < prev;
      prev = std::abs(r - 1.0);
      last = r;
      info("m=%g w=%-3g ratio %.12f oracle %.12f", m, w, r, want);
    }
    bool hit = monotone && std::abs(last - 1.0) <= tol::kMomentFinal && oracle_err <= tol::kQuadrature;
    ok = ok && hit;
    info("m=%g: monotone=%d, final |r-1|=%.2e, max oracle deviation %.1e", m, monotone, std::abs(last - 1.0),
         oracle_err);
  }
  line("5", ok, str("incomplete moment ratios: monotone, final within %.0f%%, quadrature within %.0e",
                    100 * tol::kMomentFinal, tol::kQuadrature));
}

void reduction() {
  auto s = solve(0.3, 0.1, 0.0);
  auto rep = validate_reduction(s.rep.distribution, RedistributionPolicy::flat(0.3));
  bool ok = s.rep.converged;
  double worst = 0.0;
  for (const auto& l : rep.checks) {
    worst = std::max(worst, l.max_deviation);
    ok = ok && l.max_deviation <= tol::kReduction;
    info("%-36s limit %g, max deviation %.3e over x in [%.1f, %.1f]", l.name.c_str(), l.limit, l.max_deviation,
         rep.x_lo, rep.x_hi);
  }
  line("6", ok, str("reduction ratios on a subcritical steady state: worst deviation %.3e (<= %.2f)", worst,
                    tol::kReduction));
}

struct TableRow {
  const char* label;
  double chi, zeta, lambda, gini;
};

const TableRow kTable[] = {
    {"Austria", 0.156, 0.182, 0.185, 0.763},   {"Belgium", 1.406, 1.514, 0.577, 0.589},
    {"Cyprus", 0.164, 0.190, 0.096, 0.690},    {"Germany", 0.162, 0.184, 0.199, 0.759},
    {"Spain", 1.568, 1.728, 0.502, 0.568},     {"Finland", 0.972, 1.000, 0.639, 0.665},
    {"France", 0.556, 0.608, 0.286, 0.673},    {"Greece", 1.944, 2.000, 0.650, 0.553},
    {"Italy", 1.194, 1.300, 0.502, 0.601},     {"Lithuania", 0.896, 1.066, 0.425, 0.658},
    {"Malta", 1.154, 1.348, 0.377, 0.583},     {"Netherlands", 1.676, 1.516, 0.992, 0.647},
    {"Portugal", 0.564, 0.678, 0.309, 0.672},  {"Slovenia", 1.978, 1.998, 0.618, 0.529},
};

void fitting_round_trip() {
  FitConfig cfg;
  bool fit_ok = true, ratio_ok = true;
  int gini_outside = 0;
  double worst_param = 0.0, worst_j = 0.0;
  std::string ratio_misses, gini_misses;
  for (const auto& row : kTable) {
    auto t0 = std::chrono::steady_clock::now();
    auto model = model_lorenz(row.chi, row.zeta, row.lambda, cfg);
    double g = gini(model);
    auto r = fit(sample_lorenz(model, 1000), cfg);
    double rel = std::max({std::abs(r.chi / row.chi - 1.0), std::abs(r.zeta / row.zeta - 1.0),
                           std::abs(r.lambda / row.lambda - 1.0)});
    worst_param = std::max(worst_param, rel);
    worst_j = std::max(worst_j, r.j);
    fit_ok = fit_ok && rel <= tol::kFitParam && r.j <= tol::kFitJ;
    double ratio = row.chi / row.zeta;
    if (ratio < tol::kRatioLo || ratio > tol::kRatioHi) {
      ratio_ok = false;
      ratio_misses += str(" %s=%.4f", row.label, ratio);
    }
    if (std::abs(g - row.gini) > tol::kGini) {
      ++gini_outside;
      gini_misses += str(" %s(%.4f vs %.3f)", row.label, g, row.gini);
    }
    info("%-12s fit (%.5f, %.5f, %.5f) rel %.1e J %.2e | chi/zeta %.4f | model G %.4f vs %.3f | %.1fs", row.label,
         r.chi, r.zeta, r.lambda, rel, r.j, ratio, g, row.gini, seconds_since(t0));
  }
  line("7a", fit_ok, str("fit round trip on 14 triples: worst parameter error %.2e (<= %.2f), worst J %.2e (<= %.0e)",
                         worst_param, tol::kFitParam, worst_j, tol::kFitJ));
  line("7b", ratio_ok,
       str("criticality ratios in [%.2f, %.2f]%s", tol::kRatioLo, tol::kRatioHi,
           ratio_ok ? "" : (": outside" + ratio_misses).c_str()));
  // reported only: differences in the numerical scheme are expected here
  std::printf("C7c  INFO  model Gini vs printed within +-%.2f: %d of 14 outside%s\n", tol::kGini, gini_outside,
              gini_misses.c_str());
}

void crossover() {
  const double zeta = 0.3, b = 1.0, sigma = 1.0, eps = tol::kEpsilon;
  MomentInputs m;
  m.zeta = zeta;
  m.b_inf = b;
  m.mu_bar = 1.0;
  m.t_over_n = 2.0 * zeta * b / m.mu_bar;
  // chi = zeta + eps + iota with iota the lognormal catalogue term
  CatalogueRequest rq;
  rq.family = Family::lognormal;
  rq.sigma = sigma;
  auto shifted = m;
  shifted.zeta = zeta + eps;
  auto pol = catalogue(rq, shifted).policy;
  auto g = TailFunction::lognormal(sigma);
  double w_eps = crossover_wealth([&](double w) { return g.d1(w); }, eps / b, 1.0 + 1e-9);
  // local slopes of the computed tail split into the eps w / B part and the rest
  auto split = [&](double w) {
    const double h = 1e-4;
    double slope = (forward_tail(pol, m, w * (1 + h)) - forward_tail(pol, m, w * (1 - h))) / (2.0 * h * w);
    double quad = eps * w / b;
    return std::pair{slope - quad, quad};
  };
  auto [s_lo, q_lo] = split(w_eps / 10.0);
  auto [s_hi, q_hi] = split(10.0 * w_eps);
  double below = std::abs(s_lo) / std::abs(q_lo);
  double above = std::abs(q_hi) / std::abs(s_hi);
  info("w_eps=%.4f; at w_eps/10 subquadratic %.4g vs quadratic %.4g; at 10 w_eps %.4g vs %.4g", w_eps, s_lo, q_lo,
       s_hi, q_hi);
  line("8", below >= tol::kDominance && above >= tol::kDominance,
       str("crossover: dominance %.2f below and %.2f above w_eps (>= %.0f each)", below, above, tol::kDominance));
}

void properties() {
  bool ok = true;
  std::string summary;
  for (const auto& p : props::all()) {
    auto o = p.run();
    ok = ok && o.failures == 0 && o.cases >= 1000;
    info("%-28s %s", p.name.c_str(), prop::describe(o).c_str());
    summary += str("%s%s", summary.empty() ? "" : ", ", p.name.c_str());
  }
  line("9", ok, "property suites (>= 1000 cases each): " + summary);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::function<void()> criteria[] = {phase_transition, critical_tail, monte_carlo, round_trip, moment_ratios,
                                            reduction,        fitting_round_trip, crossover, properties};
  for (int k = 1; k <= 9; ++k) {
    if (!only.empty() && !only.count(k)) continue;
    try {
      criteria[k - 1]();
    } catch (const std::exception& e) {
      line(std::to_string(k).c_str(), false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%s: %d failing line(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

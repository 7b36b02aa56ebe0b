// SPDX-License-Identifier: Apache-2.0
#include "awm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "awm/error.hpp"
#include "awm/io.hpp"

namespace awm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double v) { return std::isfinite(v); }

double interp(const std::vector<double>& x, const std::vector<double>& y, double w) {
  auto it = std::upper_bound(x.begin(), x.end(), w);
  std::size_t j = static_cast<std::size_t>(it - x.begin());
  if (j == 0) return y.front();
  if (j >= x.size()) return y.back();
  double t = (w - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + t * (y[j] - y[j - 1]);
}

double eval_catalogue(const CataloguePolicy& c, double w) {
  double u = std::max(w, c.floor);
  double base = c.zeta + c.d / u;
  switch (c.family) {
    case Family::exponential:
      return c.zeta;
    case Family::lognormal:
      return base + 2.0 * c.b_inf * std::log(u) / (c.sigma * c.sigma * u * u);
    case Family::pareto:
      return base + (c.alpha + 1.0) * c.b_inf / (u * u);
    case Family::inverse_gamma:
      if (c.literal_table_entry) return base + ((c.alpha + 1.0) * c.b_inf - c.beta * c.b_inf) / (u * u);
      return base + (c.alpha + 1.0) * c.b_inf / (u * u) - c.beta * c.b_inf / (u * u * u);
    case Family::gaussian:
      return base + 2.0 * c.b_inf / (c.sigma * c.sigma);
    case Family::higher_order_gaussian:
      return 2.0 * c.m * c.b_inf * std::pow(u, 2.0 * c.m - 2.0) / std::pow(c.sigma, 2.0 * c.m);
  }
  return c.zeta;
}

void check_catalogue(const CataloguePolicy& c) {
  require(finite(c.zeta) && c.zeta >= 0.0, Errc::parameter, "catalogue: zeta must be finite and >= 0");
  require(finite(c.b_inf) && c.b_inf > 0.0, Errc::parameter, "catalogue: B_inf must be > 0");
  require(finite(c.d), Errc::parameter, "catalogue: D must be finite");
  require(finite(c.floor) && c.floor > 0.0, Errc::parameter, "catalogue: floor must be > 0");
  switch (c.family) {
    case Family::lognormal:
    case Family::gaussian:
      require(finite(c.sigma) && c.sigma > 0.0, Errc::parameter, "catalogue: sigma must be > 0");
      break;
    case Family::pareto:
      require(finite(c.alpha) && c.alpha > 0.0, Errc::parameter, "catalogue: alpha must be > 0");
      break;
    case Family::inverse_gamma:
      require(finite(c.alpha) && c.alpha > 0.0, Errc::parameter, "catalogue: alpha must be > 0");
      require(finite(c.beta) && c.beta > 0.0, Errc::parameter, "catalogue: beta must be > 0");
      break;
    case Family::higher_order_gaussian:
      require(finite(c.m) && c.m > 1.0, Errc::parameter, "catalogue: higher-order Gaussian needs m > 1");
      require(finite(c.sigma) && c.sigma > 0.0, Errc::parameter, "catalogue: sigma must be > 0");
      break;
    case Family::exponential:
      break;
  }
}

}  // namespace

ModelParams ModelParams::make(double zeta, double lambda, std::int64_t n, double w) {
  ModelParams p{zeta, lambda, n, w};
  p.validate();
  return p;
}

void ModelParams::validate() const {
  require(finite(zeta) && zeta >= 0.0, Errc::parameter, "zeta must be finite and >= 0");
  require(finite(lambda) && lambda >= 0.0, Errc::parameter, "lambda must be finite and >= 0");
  require(n_agents >= 2, Errc::parameter, "n_agents must be >= 2");
  require(finite(total_wealth) && total_wealth > 0.0, Errc::parameter, "total_wealth must be > 0");
}

const char* family_name(Family f) noexcept {
  switch (f) {
    case Family::exponential: return "exponential";
    case Family::lognormal: return "lognormal";
    case Family::pareto: return "pareto";
    case Family::inverse_gamma: return "inverse-gamma";
    case Family::gaussian: return "gaussian";
    case Family::higher_order_gaussian: return "higher-order-gaussian";
  }
  return "unknown";
}

RedistributionPolicy::RedistributionPolicy(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const FlatPolicy& f) {
                   require(finite(f.chi) && f.chi >= 0.0, Errc::parameter, "flat policy: chi must be >= 0");
                 },
                 [](const CataloguePolicy& c) { check_catalogue(c); },
                 [](const PiecewisePolicy& p) {
                   require(!p.knots.empty() && p.knots.size() == p.values.size(), Errc::parameter,
                           "piecewise policy: knots and values must be nonempty and aligned");
                   for (std::size_t i = 1; i < p.knots.size(); ++i)
                     require(p.knots[i] > p.knots[i - 1], Errc::parameter,
                             "piecewise policy: knots must be strictly increasing");
                   for (double v : p.values) require(finite(v), Errc::parameter, "piecewise policy: non-finite value");
                 },
                 [](const SampledPolicy& s) {
                   require(!s.grid.empty() && s.grid.size() == s.rates.size(), Errc::parameter,
                           "sampled policy: grid and rates must be nonempty and aligned");
                   for (std::size_t i = 1; i < s.grid.size(); ++i)
                     require(s.grid[i] > s.grid[i - 1], Errc::parameter,
                             "sampled policy: grid must be strictly increasing");
                   for (double v : s.rates) require(finite(v), Errc::parameter, "sampled policy: non-finite rate");
                 },
                 [](const CustomPolicy& c) {
                   require(static_cast<bool>(c.fn), Errc::parameter, "custom policy: empty callable");
                 },
             },
             v_);
}

RedistributionPolicy RedistributionPolicy::flat(double chi) { return RedistributionPolicy(FlatPolicy{chi}); }

RedistributionPolicy RedistributionPolicy::catalogue(const CataloguePolicy& c) { return RedistributionPolicy(c); }

RedistributionPolicy RedistributionPolicy::piecewise(std::vector<double> knots, std::vector<double> values) {
  return RedistributionPolicy(PiecewisePolicy{std::move(knots), std::move(values)});
}

RedistributionPolicy RedistributionPolicy::sampled(std::vector<double> grid, std::vector<double> rates) {
  return RedistributionPolicy(SampledPolicy{std::move(grid), std::move(rates)});
}

RedistributionPolicy RedistributionPolicy::custom(std::function<double(double)> fn, double limit,
                                                  std::string label) {
  return RedistributionPolicy(CustomPolicy{std::move(fn), limit, std::move(label)});
}

double RedistributionPolicy::operator()(double w) const {
  return std::visit(overloaded{
                        [](const FlatPolicy& f) { return f.chi; },
                        [w](const CataloguePolicy& c) { return eval_catalogue(c, w); },
                        [w](const PiecewisePolicy& p) { return interp(p.knots, p.values, w); },
                        [w](const SampledPolicy& s) {
                          if (w < s.grid.front())
                            fail(Errc::extrapolation, "sampled policy queried below its grid at w=" +
                                                          std::to_string(w));
                          return interp(s.grid, s.rates, w);
                        },
                        [w](const CustomPolicy& c) { return c.fn(w); },
                    },
                    v_);
}

double RedistributionPolicy::eval(double w, double delta) const {
  if (!(w >= -delta))
    fail(Errc::domain, "policy evaluated below the debt limit: w=" + std::to_string(w) +
                           " < -Delta=" + std::to_string(-delta));
  return (*this)(w);
}

double RedistributionPolicy::asymptotic() const {
  return std::visit(overloaded{
                        [](const FlatPolicy& f) { return f.chi; },
                        [](const CataloguePolicy& c) {
                          switch (c.family) {
                            case Family::gaussian:
                              return c.zeta + 2.0 * c.b_inf / (c.sigma * c.sigma);
                            case Family::higher_order_gaussian:
                              return std::numeric_limits<double>::infinity();
                            default:
                              return c.zeta;
                          }
                        },
                        [](const PiecewisePolicy& p) { return p.values.back(); },
                        [](const SampledPolicy& s) { return s.rates.back(); },
                        [](const CustomPolicy& c) { return c.limit; },
                    },
                    v_);
}

std::string RedistributionPolicy::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const FlatPolicy& f) { os << "flat:" << format_double(f.chi); },
                 [&](const CataloguePolicy& c) {
                   os << family_name(c.family) << ":zeta=" << format_double(c.zeta) << ",B=" << format_double(c.b_inf)
                      << ",D=" << format_double(c.d);
                   if (c.family == Family::pareto || c.family == Family::inverse_gamma) os << ",alpha=" << format_double(c.alpha);
                   if (c.family == Family::inverse_gamma) os << ",beta=" << format_double(c.beta);
                   if (c.family == Family::lognormal || c.family == Family::gaussian ||
                       c.family == Family::higher_order_gaussian)
                     os << ",sigma=" << format_double(c.sigma);
                   if (c.family == Family::higher_order_gaussian) os << ",m=" << format_double(c.m);
                 },
                 [&](const PiecewisePolicy& p) { os << "piecewise:" << p.knots.size() << " knots"; },
                 [&](const SampledPolicy& s) { os << "sampled:" << s.grid.size() << " points"; },
                 [&](const CustomPolicy& c) { os << "custom:" << c.label; },
             },
             v_);
  return os.str();
}

double eval_policy(const RedistributionPolicy& p, double w, double delta) { return p.eval(w, delta); }

void WealthDistribution::validate(double tol) const {
  require(grid.size() >= 2 && grid.size() == density.size(), Errc::argument,
          "distribution: grid and density must be aligned with at least 2 nodes");
  require(finite(n_agents) && n_agents > 0.0, Errc::argument, "distribution: n_agents must be > 0");
  require(finite(total_wealth) && total_wealth > 0.0, Errc::argument, "distribution: total_wealth must be > 0");
  require(finite(lambda) && lambda >= 0.0, Errc::argument, "distribution: lambda must be >= 0");
  require(condensed_fraction >= 0.0 && condensed_fraction <= 1.0, Errc::argument,
          "distribution: condensed_fraction outside [0, 1]");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], Errc::argument, "distribution: grid must be strictly increasing");
  for (double p : density) require(finite(p) && p >= 0.0, Errc::argument, "distribution: negative density");
  double expected_delta = lambda * total_wealth / n_agents;
  require(std::abs(delta() - expected_delta) <= tol * std::max(1.0, expected_delta) * 10.0 + 1e-12,
          Errc::argument, "distribution: grid must start at -Delta");
  auto h = trapezoid_weights(grid);
  double n = 0.0, w = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    n += h[i] * density[i];
    w += h[i] * density[i] * grid[i];
  }
  require(std::abs(n - n_agents) <= tol * n_agents, Errc::argument,
          "distribution: density does not integrate to n_agents");
  require(std::abs(w + condensed_fraction * total_wealth - total_wealth) <= tol * total_wealth, Errc::argument,
          "distribution: wealth balance violated");
}

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::size_t n = x.size();
  std::vector<double> h(n, 0.0);
  if (n < 2) return h;
  h[0] = 0.5 * (x[1] - x[0]);
  h[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) h[i] = 0.5 * (x[i + 1] - x[i - 1]);
  return h;
}

Potentials compute_potentials(const WealthDistribution& dist, const RedistributionPolicy& policy, Frame frame) {
  dist.validate();
  const std::size_t n = dist.size();
  const double delta = dist.delta();
  const double shift = frame == Frame::shifted ? delta : 0.0;
  const double wref = frame == Frame::shifted ? dist.total_wealth + dist.n_agents * delta : dist.total_wealth;
  const double nn = dist.n_agents;
  Potentials p;
  p.a.assign(n, 0.0);
  p.l.assign(n, 0.0);
  p.b.assign(n, 0.0);
  const auto& x = dist.grid;
  const auto& d = dist.density;
  double tail = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    tail += 0.5 * (d[i] + d[i + 1]) * (x[i + 1] - x[i]);
    p.a[i] = tail;
  }
  double total = p.a[0];
  for (std::size_t i = 0; i < n; ++i) p.a[i] = total > 0.0 ? p.a[i] / total : 0.0;
  double lsum = 0.0, bsum = 0.0, t = 0.0;
  auto h = trapezoid_weights(x);
  for (std::size_t i = 0; i < n; ++i) {
    double xi = x[i] + shift;
    if (i > 0) {
      double xp = x[i - 1] + shift;
      double dx = x[i] - x[i - 1];
      lsum += 0.5 * (d[i - 1] * xp + d[i] * xi) * dx;
      bsum += 0.25 * (d[i - 1] * xp * xp + d[i] * xi * xi) * dx;
    }
    p.l[i] = lsum / wref;
    p.b[i] = bsum / nn;
    double pay = policy.eval(x[i], delta) * (x[i] + delta);
    if (!finite(pay)) fail(Errc::integrability, "redistribution integrand is not finite");
    t += h[i] * d[i] * pay;
  }
  double chi_top = policy.eval(x.back(), delta);
  t += chi_top * dist.condensed_fraction * dist.total_wealth;
  if (!finite(t)) fail(Errc::integrability, "redistribution total diverges");
  p.t = t;
  double cshare = dist.condensed_fraction * dist.total_wealth / wref;
  p.l_inf = 1.0 - cshare;
  p.b_inf = p.b.back();
  return p;
}

Potentials ensemble_potentials(const std::vector<double>& wealths, double delta, const std::vector<double>& at,
                               const RedistributionPolicy& policy) {
  require(!wealths.empty(), Errc::argument, "ensemble_potentials: empty ensemble");
  std::vector<double> s(wealths);
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  std::vector<double> pw(n + 1, 0.0), pb(n + 1, 0.0);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pw[i + 1] = pw[i] + s[i];
    pb[i + 1] = pb[i] + 0.5 * s[i] * s[i];
  }
  for (double w : wealths) t += policy.eval(w, delta) * (w + delta);
  const double nn = static_cast<double>(n);
  const double total = pw[n];
  Potentials p;
  p.a.reserve(at.size());
  p.l.reserve(at.size());
  p.b.reserve(at.size());
  for (double w : at) {
    std::size_t ge = static_cast<std::size_t>(s.end() - std::lower_bound(s.begin(), s.end(), w));
    std::size_t le = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), w) - s.begin());
    p.a.push_back(static_cast<double>(ge) / nn);
    p.l.push_back(pw[le] / total);
    p.b.push_back(pb[le] / nn);
  }
  p.t = t;
  p.l_inf = 1.0;
  p.b_inf = pb[n] / nn;
  return p;
}

LorenzCurve lorenz_curve(const WealthDistribution& dist) {
  dist.validate();
  const std::size_t n = dist.size();
  const auto& x = dist.grid;
  const auto& d = dist.density;
  std::vector<double> cn(n, 0.0), cw(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double dx = x[i] - x[i - 1];
    cn[i] = cn[i - 1] + 0.5 * (d[i - 1] + d[i]) * dx;
    cw[i] = cw[i - 1] + 0.5 * (d[i - 1] * x[i - 1] + d[i] * x[i]) * dx;
  }
  const double c = dist.condensed_fraction;
  LorenzCurve out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = cn[n - 1] > 0.0 ? cn[i] / cn[n - 1] : 0.0;
    out.push_back({f, cw[i] / dist.total_wealth});
  }
  out.front() = {0.0, 0.0};
  out.back() = {1.0, 1.0 - c};
  return out;
}

LorenzCurve lorenz_curve(std::vector<double> wealths) {
  require(!wealths.empty(), Errc::argument, "lorenz_curve: empty ensemble");
  std::sort(wealths.begin(), wealths.end());
  double total = std::accumulate(wealths.begin(), wealths.end(), 0.0);
  require(total > 0.0, Errc::argument, "lorenz_curve: total wealth must be > 0");
  const double n = static_cast<double>(wealths.size());
  LorenzCurve out;
  out.reserve(wealths.size() + 1);
  out.push_back({0.0, 0.0});
  double cum = 0.0;
  for (std::size_t i = 0; i < wealths.size(); ++i) {
    cum += wealths[i];
    out.push_back({static_cast<double>(i + 1) / n, cum / total});
  }
  out.back() = {1.0, 1.0};
  return out;
}

double lorenz_area(const LorenzCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += 0.5 * (curve[i].l + curve[i - 1].l) * (curve[i].f - curve[i - 1].f);
  return area;
}

double gini(const LorenzCurve& curve) { return 1.0 - 2.0 * lorenz_area(curve); }

double gini(const WealthDistribution& dist) { return gini(lorenz_curve(dist)); }

double gini(const std::vector<double>& wealths) { return gini(lorenz_curve(wealths)); }

double l_infinity_eysm(double chi_inf, double zeta) {
  require(zeta >= 0.0 && chi_inf >= 0.0, Errc::parameter, "l_infinity: rates must be >= 0");
  if (zeta == 0.0 && chi_inf == 0.0) fail(Errc::undefined_regime, "l_infinity: chi_inf = zeta = 0 is undefined");
  return zeta <= chi_inf ? 1.0 : chi_inf / zeta;
}

double oligarch_fraction_awm(double chi_inf, double zeta, double lambda) {
  require(lambda >= 0.0, Errc::parameter, "oligarch_fraction: lambda must be >= 0");
  double l = l_infinity_eysm(chi_inf, zeta);
  if (l >= 1.0) return 0.0;
  double c = (1.0 + lambda) * (1.0 - l);
  if (c > 1.0)
    fail(Errc::infeasible, "oligarch fraction (1+lambda)(1-chi/zeta) = " + std::to_string(c) + " exceeds 1");
  return c;
}

}  // namespace awm

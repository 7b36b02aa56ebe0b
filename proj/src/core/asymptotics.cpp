// SPDX-License-Identifier: Apache-2.0
#include "awm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "awm/error.hpp"
#include "awm/io.hpp"

namespace awm {

namespace {

using boost::math::quadrature::gauss_kronrod;

bool finite(double v) { return std::isfinite(v); }

double integrate(const std::function<double(double)>& g, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  double v = gauss_kronrod<double, 31>::integrate(g, a, b, 20, rel_tol, &err);
  if (!finite(v) || !finite(err)) fail(Errc::integrability, "quadrature produced a non-finite value");
  if (err > 1e-6 * std::max(std::abs(v), 1e-300) && err > 1e-14)
    fail(Errc::integrability, "quadrature did not converge (error estimate " + std::to_string(err) + ")");
  return v;
}

// Breakpoints of piecewise policies inside (a, b), so quadrature never straddles a kink.
std::vector<double> breakpoints(const RedistributionPolicy& policy, double a, double b) {
  std::vector<double> cuts{a};
  const std::vector<double>* knots = nullptr;
  if (auto* pw = std::get_if<PiecewisePolicy>(&policy.variant())) knots = &pw->knots;
  if (auto* sp = std::get_if<SampledPolicy>(&policy.variant())) knots = &sp->grid;
  if (auto* cp = std::get_if<CataloguePolicy>(&policy.variant())) {
    if (cp->floor > a && cp->floor < b) cuts.push_back(cp->floor);
  }
  if (knots)
    for (double k : *knots)
      if (k > a && k < b) cuts.push_back(k);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

void check_positive(double w, const char* what) {
  require(finite(w) && w > 0.0, Errc::domain, std::string(what) + ": wealth must be > 0");
}

TailFunction make(TailKind kind, std::string label, double threshold) {
  TailFunction t;
  t.kind = kind;
  t.label = std::move(label);
  t.threshold = threshold;
  return t;
}

Verdict trend_to_zero(const std::vector<double>& r) {
  bool all_zero = std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; });
  if (all_zero) return Verdict::satisfied;
  bool dec = true, nondec = true;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] < r[i - 1] * (1.0 - 1e-9))) dec = false;
    if (r[i] < r[i - 1] * (1.0 - 1e-9)) nondec = false;
  }
  if (dec) return Verdict::satisfied;
  if (nondec) return Verdict::violated;
  return Verdict::inconclusive;
}

Verdict trend_to_minus_infinity(const std::vector<double>& r) {
  bool dec = true, nondec = true;
  for (std::size_t i = 1; i < r.size(); ++i) {
    double step = r[i] - r[i - 1];
    double eps = 1e-12 * std::max(std::abs(r[i]), 1.0);
    if (!(step < -eps)) dec = false;
    if (step < -eps) nondec = false;
  }
  if (dec) return Verdict::satisfied;
  if (nondec) return Verdict::violated;
  return Verdict::inconclusive;
}

std::size_t top_resolved(const std::vector<double>& p, double floor) {
  double pmax = *std::max_element(p.begin(), p.end());
  std::size_t r = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] >= floor * pmax && p[i] > 0.0) r = i;
  return r;
}

}  // namespace

const char* tail_kind_name(TailKind k) noexcept {
  switch (k) {
    case TailKind::exponential: return "exponential";
    case TailKind::lognormal: return "lognormal";
    case TailKind::pareto: return "pareto";
    case TailKind::inverse_gamma: return "inverse-gamma";
    case TailKind::gaussian: return "gaussian";
    case TailKind::higher_order_gaussian: return "higher-order-gaussian";
    case TailKind::power_log: return "power-log";
    case TailKind::custom: return "custom";
  }
  return "custom";
}

const char* verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

TailFunction TailFunction::exponential(double rate) {
  require(finite(rate) && rate > 0.0, Errc::parameter, "exponential tail: rate must be > 0");
  auto t = make(TailKind::exponential, "exponential", 0.0);
  t.rate = rate;
  t.f = [rate](double w) { return rate * w; };
  t.fp = [rate](double) { return rate; };
  t.fpp = [](double) { return 0.0; };
  return t;
}

TailFunction TailFunction::lognormal(double sigma) {
  require(finite(sigma) && sigma > 0.0, Errc::parameter, "lognormal tail: sigma must be > 0");
  auto t = make(TailKind::lognormal, "lognormal", 1.0);
  t.sigma = sigma;
  double s2 = sigma * sigma;
  t.f = [s2](double w) { return std::log(w) * std::log(w) / s2; };
  t.fp = [s2](double w) { return 2.0 * std::log(w) / (s2 * w); };
  t.fpp = [s2](double w) { return (2.0 - 2.0 * std::log(w)) / (s2 * w * w); };
  return t;
}

TailFunction TailFunction::pareto(double alpha) {
  require(finite(alpha) && alpha > 0.0, Errc::parameter, "pareto tail: alpha must be > 0");
  auto t = make(TailKind::pareto, "pareto", 0.0);
  t.alpha = alpha;
  double k = alpha + 1.0;
  t.f = [k](double w) { return k * std::log(w); };
  t.fp = [k](double w) { return k / w; };
  t.fpp = [k](double w) { return -k / (w * w); };
  return t;
}

TailFunction TailFunction::inverse_gamma(double alpha, double beta) {
  require(finite(alpha) && alpha > 0.0, Errc::parameter, "inverse-gamma tail: alpha must be > 0");
  require(finite(beta) && beta > 0.0, Errc::parameter, "inverse-gamma tail: beta must be > 0");
  double k = alpha + 1.0;
  auto t = make(TailKind::inverse_gamma, "inverse-gamma", beta / k);
  t.alpha = alpha;
  t.beta = beta;
  t.f = [k, beta](double w) { return k * std::log(w) + beta / w; };
  t.fp = [k, beta](double w) { return k / w - beta / (w * w); };
  t.fpp = [k, beta](double w) { return -k / (w * w) + 2.0 * beta / (w * w * w); };
  return t;
}

TailFunction TailFunction::gaussian(double sigma) {
  require(finite(sigma) && sigma > 0.0, Errc::parameter, "gaussian tail: sigma must be > 0");
  auto t = make(TailKind::gaussian, "gaussian", 0.0);
  t.sigma = sigma;
  double s2 = sigma * sigma;
  t.f = [s2](double w) { return w * w / s2; };
  t.fp = [s2](double w) { return 2.0 * w / s2; };
  t.fpp = [s2](double) { return 2.0 / s2; };
  return t;
}

TailFunction TailFunction::higher_order_gaussian(double m, double sigma) {
  require(finite(m) && m > 1.0, Errc::parameter, "higher-order Gaussian tail needs m > 1");
  require(finite(sigma) && sigma > 0.0, Errc::parameter, "higher-order Gaussian tail: sigma must be > 0");
  auto t = make(TailKind::higher_order_gaussian, "higher-order-gaussian", 0.0);
  t.m = m;
  t.sigma = sigma;
  double s = std::pow(sigma, 2.0 * m);
  t.f = [m, s](double w) { return std::pow(w, 2.0 * m) / s; };
  t.fp = [m, s](double w) { return 2.0 * m * std::pow(w, 2.0 * m - 1.0) / s; };
  t.fpp = [m, s](double w) { return 2.0 * m * (2.0 * m - 1.0) * std::pow(w, 2.0 * m - 2.0) / s; };
  return t;
}

TailFunction TailFunction::power_log(double a, double p, double q) {
  require(finite(a) && a > 0.0, Errc::parameter, "power-log tail: a must be > 0");
  require(finite(p) && p >= 0.0 && finite(q), Errc::parameter, "power-log tail: need p >= 0 and finite q");
  require(p > 0.0 || q > 0.0, Errc::parameter, "power-log tail: p = q = 0 is constant");
  auto t = make(TailKind::power_log, "power-log", q != 0.0 ? 1.0 : 0.0);
  t.a = a;
  t.p = p;
  t.q = q;
  // g = log w; f = a w^p g^q
  t.f = [a, p, q](double w) {
    double g = std::log(w);
    return a * std::pow(w, p) * (q == 0.0 ? 1.0 : std::pow(g, q));
  };
  t.fp = [a, p, q](double w) {
    double g = std::log(w);
    double gq = q == 0.0 ? 1.0 : std::pow(g, q);
    double gq1 = q == 0.0 ? 0.0 : q * std::pow(g, q - 1.0);
    return a * std::pow(w, p - 1.0) * (p * gq + gq1);
  };
  t.fpp = [a, p, q](double w) {
    double g = std::log(w);
    double gq = q == 0.0 ? 1.0 : std::pow(g, q);
    double gq1 = q == 0.0 ? 0.0 : q * std::pow(g, q - 1.0);
    double gq2 = (q == 0.0 || q == 1.0) ? 0.0 : q * (q - 1.0) * std::pow(g, q - 2.0);
    return a * std::pow(w, p - 2.0) * (p * (p - 1.0) * gq + (2.0 * p - 1.0) * gq1 + gq2);
  };
  return t;
}

TailFunction TailFunction::custom(std::function<double(double)> f, std::function<double(double)> fp,
                                  std::function<double(double)> fpp, double threshold, std::string label) {
  require(static_cast<bool>(f) && static_cast<bool>(fp) && static_cast<bool>(fpp), Errc::argument,
          "custom tail: f, f' and f'' are required");
  require(finite(threshold) && threshold >= 0.0, Errc::parameter, "custom tail: threshold must be >= 0");
  auto t = make(TailKind::custom, label.empty() ? "custom" : std::move(label), threshold);
  t.f = std::move(f);
  t.fp = std::move(fp);
  t.fpp = std::move(fpp);
  return t;
}

double TailFunction::value(double w) const {
  check_positive(w, "tail f");
  return f(w);
}

double TailFunction::d1(double w) const {
  check_positive(w, "tail f'");
  if (w < threshold) fail(Errc::domain, "tail f' requested below its validity threshold " + std::to_string(threshold));
  return fp(w);
}

double TailFunction::d2(double w) const {
  check_positive(w, "tail f''");
  if (w < threshold) fail(Errc::domain, "tail f'' requested below its validity threshold " + std::to_string(threshold));
  return fpp(w);
}

std::string TailFunction::describe() const {
  std::ostringstream os;
  os << tail_kind_name(kind);
  switch (kind) {
    case TailKind::exponential: os << "(rate=" << format_double(rate) << ")"; break;
    case TailKind::lognormal:
    case TailKind::gaussian: os << "(sigma=" << format_double(sigma) << ")"; break;
    case TailKind::pareto: os << "(alpha=" << format_double(alpha) << ")"; break;
    case TailKind::inverse_gamma: os << "(alpha=" << format_double(alpha) << ",beta=" << format_double(beta) << ")"; break;
    case TailKind::higher_order_gaussian: os << "(m=" << format_double(m) << ",sigma=" << format_double(sigma) << ")"; break;
    case TailKind::power_log: os << "(a=" << format_double(a) << ",p=" << format_double(p) << ",q=" << format_double(q) << ")"; break;
    case TailKind::custom: os << "(" << label << ")"; break;
  }
  return os.str();
}

void MomentInputs::validate() const {
  require(finite(b_inf) && b_inf > 0.0, Errc::parameter, "moments: B_inf must be > 0");
  require(finite(l_inf) && l_inf >= 0.0 && l_inf <= 1.0, Errc::parameter, "moments: L_inf must lie in [0, 1]");
  require(finite(t_over_n), Errc::parameter, "moments: T/N must be finite");
  require(finite(mu_bar) && mu_bar > 0.0, Errc::parameter, "moments: mu_bar must be > 0");
  require(finite(delta) && delta >= 0.0, Errc::parameter, "moments: delta must be >= 0");
  require(finite(zeta) && zeta >= 0.0, Errc::parameter, "moments: zeta must be >= 0");
  require(finite(d), Errc::parameter, "moments: D must be finite");
}

ForwardTerms forward_tail_terms(const RedistributionPolicy& policy, const MomentInputs& mo, double w,
                                const ForwardOptions& options) {
  mo.validate();
  require(finite(w) && w + mo.delta > 0.0, Errc::domain, "forward tail: need w > -delta");
  const double b = mo.b_inf;
  const double y = w + mo.delta;
  ForwardTerms r;
  if (policy.is_flat()) {
    double chi = std::get<FlatPolicy>(policy.variant()).chi;
    r.integral = chi * y * y / (2.0 * b);
  } else {
    double x0 = std::isnan(options.x_ref) ? mo.mu_bar : options.x_ref;
    require(finite(x0) && x0 > 0.0, Errc::argument, "forward tail: x_ref must be > 0");
    // the asymptotic constant is integrated in closed form; quadrature sees only the decaying remainder
    double c0 = policy.asymptotic();
    if (!finite(c0)) c0 = 0.0;
    std::function<double(double)> g = [&policy, c0](double x) { return (policy(x) - c0) * x; };
    double lo = std::min(x0, y), hi = std::max(x0, y);
    double acc = 0.0;
    auto cuts = breakpoints(policy, lo, hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      for (double a = cuts[i]; a < cuts[i + 1];) {
        double e = std::min(2.0 * a, cuts[i + 1]);
        acc += integrate(g, a, e, options.rel_tol);
        a = e;
      }
    }
    r.integral = ((y >= x0 ? acc : -acc) + 0.5 * c0 * (y * y - x0 * x0)) / b;
  }
  const double one_m_2l = 1.0 - 2.0 * mo.l_inf;
  r.quadratic = mo.zeta * one_m_2l * w * w / (2.0 * b);
  r.linear = (2.0 * mo.zeta * b - mo.t_over_n * mo.mu_bar + mo.zeta * mo.delta * mo.mu_bar * one_m_2l) /
             (b * mo.mu_bar) * w;
  r.total = r.integral + r.quadratic + r.linear;
  if (!finite(r.total)) fail(Errc::integrability, "forward tail is not finite");
  return r;
}

double forward_tail(const RedistributionPolicy& policy, const MomentInputs& moments, double w,
                    const ForwardOptions& options) {
  return forward_tail_terms(policy, moments, w, options).total;
}

double InvertedPolicy::iota(double y) const {
  require(finite(y) && y > 0.0, Errc::domain, "inverted policy: wealth must be > 0");
  double k = (2.0 * moments.zeta * moments.b_inf - moments.t_over_n * moments.mu_bar) / moments.mu_bar;
  return (moments.b_inf * tail.d1(y - moments.delta) - k + moments.d) / y;
}

double InvertedPolicy::operator()(double y) const { return constant + iota(y); }

RedistributionPolicy InvertedPolicy::policy() const {
  InvertedPolicy self = *this;
  double limit = constant;
  if (tail.kind == TailKind::gaussian) limit = std::numeric_limits<double>::quiet_NaN();
  if (tail.kind == TailKind::higher_order_gaussian) limit = std::numeric_limits<double>::infinity();
  if (tail.kind == TailKind::power_log && tail.p >= 2.0) limit = std::numeric_limits<double>::infinity();
  if (tail.kind == TailKind::custom) limit = std::numeric_limits<double>::quiet_NaN();
  return RedistributionPolicy::custom([self](double y) { return self(y); }, limit, "inverted:" + tail.describe());
}

RedistributionPolicy InvertedPolicy::sampled(const std::vector<double>& grid) const {
  std::vector<double> rates;
  rates.reserve(grid.size());
  for (double y : grid) rates.push_back((*this)(y));
  return RedistributionPolicy::sampled(grid, std::move(rates));
}

InvertedPolicy invert_redistribution(const TailFunction& tail, const MomentInputs& moments) {
  moments.validate();
  require(static_cast<bool>(tail.fp), Errc::argument, "invert: tail has no derivative");
  InvertedPolicy inv;
  inv.tail = tail;
  inv.moments = moments;
  inv.constant = moments.zeta * (2.0 * moments.l_inf - 1.0);
  return inv;
}

CatalogueEntry catalogue(const CatalogueRequest& rq, const MomentInputs& mo) {
  mo.validate();
  if (rq.family == Family::higher_order_gaussian)
    require(finite(rq.m) && rq.m > 1.0, Errc::parameter, "catalogue: higher-order Gaussian needs m > 1");
  CatalogueEntry e;
  if (rq.family == Family::exponential) {
    e.policy = RedistributionPolicy::flat(mo.zeta);
    return e;
  }
  CataloguePolicy c;
  c.family = rq.family;
  c.zeta = mo.zeta;
  c.b_inf = mo.b_inf;
  c.d = mo.d;
  c.alpha = rq.alpha;
  c.beta = rq.beta;
  c.sigma = rq.sigma;
  c.m = rq.m;
  c.floor = rq.floor;
  c.literal_table_entry = rq.literal_table_entry;
  e.policy = RedistributionPolicy::catalogue(c);
  if (rq.family == Family::gaussian) {
    e.critical = false;
    e.marker = "lim chi(w) != zeta: quadratic decay is the non-critical regime";
  } else if (rq.family == Family::higher_order_gaussian) {
    e.critical = false;
    e.marker = "chi(w) grows without bound";
  }
  return e;
}

double crossover_wealth(const std::function<double(double)>& g_prime, double epsilon, double lo, double hi) {
  require(finite(epsilon) && epsilon != 0.0, Errc::argument, "crossover: epsilon must be nonzero");
  require(finite(lo) && finite(hi) && lo > 0.0 && hi > lo, Errc::argument, "crossover: need 0 < lo < hi");
  const double eps = std::abs(epsilon);
  auto h = [&](double w) { return g_prime(w) - eps * w; };
  double top = hi;
  double htop = h(top);
  if (!(htop < 0.0)) fail(Errc::no_crossover, "crossover: g'(w) - eps w has no sign change in the bracket");
  double w = top;
  while (true) {
    double next = w / 2.0;
    if (next < lo) fail(Errc::no_crossover, "crossover: g'(w) - eps w has no sign change in the bracket");
    double hv = h(next);
    if (!finite(hv)) fail(Errc::no_crossover, "crossover: g' is not finite in the bracket");
    if (hv >= 0.0) {
      double a = next, b = w;
      for (int it = 0; it < 400 && (b - a) > 1e-15 * b; ++it) {
        double mid = 0.5 * (a + b);
        if (h(mid) >= 0.0)
          a = mid;
        else
          b = mid;
      }
      return 0.5 * (a + b);
    }
    w = next;
  }
}

bool no_agents_beyond(const WealthDistribution& dist, double w) {
  dist.validate();
  const auto& x = dist.grid;
  const auto& p = dist.density;
  double count = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i + 1] <= w) continue;
    double a = std::max(x[i], w);
    double t0 = (a - x[i]) / (x[i + 1] - x[i]);
    double pa = p[i] + t0 * (p[i + 1] - p[i]);
    count += 0.5 * (pa + p[i + 1]) * (x[i + 1] - a);
  }
  return count < 1.0;
}

std::vector<double> probe_ladder(double w, int count) {
  require(finite(w) && w > 0.0 && count >= 2, Errc::argument, "probe ladder: need w > 0 and count >= 2");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(w * std::ldexp(1.0, k));
  return out;
}

AssumptionReport check_assumptions(const TailFunction& tail, const std::vector<double>& probes) {
  require(probes.size() >= 2, Errc::argument, "check: need at least two probes");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    require(finite(probes[i]) && probes[i] > 0.0 && probes[i] >= tail.threshold, Errc::argument,
            "check: probes must lie above the tail threshold");
    if (i) require(probes[i] > probes[i - 1], Errc::argument, "check: probes must be increasing");
  }
  AssumptionReport rep;
  rep.probes = probes;
  ConditionReport c1{"f'(w) > 0", {}, Verdict::satisfied};
  ConditionReport c2{"sqrt|f''(w)| / f'(w) -> 0", {}, Verdict::inconclusive};
  ConditionReport c3{"log(w^2 / (f'(w)^2 e^f(w))) -> -inf", {}, Verdict::inconclusive};
  for (double w : probes) {
    double d1 = tail.d1(w), d2 = tail.d2(w), f = tail.value(w);
    c1.ratios.push_back(d1);
    if (!(d1 > 0.0)) c1.verdict = Verdict::violated;
    c2.ratios.push_back(d1 > 0.0 ? std::sqrt(std::abs(d2)) / d1 : std::numeric_limits<double>::infinity());
    c3.ratios.push_back(d1 > 0.0 ? 2.0 * std::log(w) - 2.0 * std::log(d1) - f
                                 : std::numeric_limits<double>::infinity());
  }
  if (c1.verdict == Verdict::satisfied) {
    c2.verdict = trend_to_zero(c2.ratios);
    c3.verdict = trend_to_minus_infinity(c3.ratios);
  } else {
    c2.verdict = Verdict::inconclusive;
    c3.verdict = Verdict::inconclusive;
  }
  rep.conditions = {c1, c2, c3};
  bool any_violated = false, all_ok = true;
  for (const auto& c : rep.conditions) {
    if (c.verdict == Verdict::violated) any_violated = true;
    if (c.verdict != Verdict::satisfied) all_ok = false;
  }
  rep.overall = any_violated ? Verdict::violated : (all_ok ? Verdict::satisfied : Verdict::inconclusive);
  switch (tail.kind) {
    case TailKind::exponential:
    case TailKind::lognormal:
    case TailKind::gaussian:
    case TailKind::higher_order_gaussian: rep.class_membership = "inside"; break;
    case TailKind::pareto:
    case TailKind::inverse_gamma: rep.class_membership = "outside"; break;
    case TailKind::power_log:
      rep.class_membership = (tail.p > 0.0 || tail.q > 1.0) ? "inside" : "outside";
      break;
    case TailKind::custom: rep.class_membership = "unknown"; break;
  }
  return rep;
}

double incomplete_moment_ratio(const TailFunction& tail, double m, double w, double rel_tol) {
  require(finite(m) && m >= 0.0, Errc::argument, "incomplete moment: m must be >= 0");
  require(finite(rel_tol) && rel_tol > 0.0, Errc::argument, "incomplete moment: rel_tol must be > 0");
  const double fw = tail.value(w);
  const double dw = tail.d1(w);
  require(dw > 0.0, Errc::domain, "incomplete moment: f'(w) must be > 0");
  // integrand scaled by w^-m e^{f(w)} so the approximation is 1/f'(w)
  std::function<double(double)> g = [&](double x) {
    return std::exp(m * std::log(x / w) - (tail.f(x) - fw));
  };
  const double approx = 1.0 / dw;
  double peak = g(w);
  double total = 0.0;
  double a = w, len = approx;
  for (int it = 0; it < 2000; ++it) {
    double b = a + len;
    if (!finite(b)) break;
    total += integrate(g, a, b, rel_tol);
    double gb = g(b);
    if (!finite(gb) || !finite(total)) fail(Errc::integrability, "incomplete moment: integrand not finite");
    peak = std::max(peak, gb);
    if (gb < 1e-30 * peak) {
      // remainder bound for a power-law decay beyond b
      if (gb * b > rel_tol * total) fail(Errc::integrability, "incomplete moment: integral does not converge");
      return total / approx;
    }
    a = b;
    len *= 2.0;
  }
  fail(Errc::integrability, "incomplete moment: truncation point not reached");
}

ReductionReport validate_reduction(const WealthDistribution& dist, const RedistributionPolicy& policy,
                                   double floor) {
  dist.validate();
  require(finite(floor) && floor > 0.0 && floor < 1.0, Errc::argument, "reduction: floor must lie in (0, 1)");
  auto pot = compute_potentials(dist, policy, Frame::shifted);
  const double delta = dist.delta();
  const double mu_bar = (dist.total_wealth + dist.n_agents * delta) / dist.n_agents;
  const double binf = pot.b_inf;
  const double linf = pot.l_inf;
  std::size_t r = top_resolved(dist.density, floor);
  double x_hi = dist.grid[r] + delta;
  double x_lo = x_hi / 10.0;
  ReductionReport rep;
  rep.x_lo = x_lo;
  rep.x_hi = x_hi;
  RatioCheck c1p{"(B + x^2 A/2) / B_inf", 1.0, 0.0, {}};
  RatioCheck c1m{"(B - x^2 A/2) / B_inf", 1.0, 0.0, {}};
  RatioCheck c2{"x A p mu_bar^2 / B_inf", 0.0, 0.0, {}};
  RatioCheck c3{"drift bracket / asymptotic bracket", 1.0, 0.0, {}};
  for (std::size_t i = 0; i <= r; ++i) {
    double x = dist.grid[i] + delta;
    if (x < x_lo) continue;
    double a = pot.a[i], b = pot.b[i], l = pot.l[i];
    double p = dist.density[i] / dist.n_agents;
    rep.x.push_back(x);
    c1p.ratios.push_back((b + 0.5 * x * x * a) / binf);
    c1m.ratios.push_back((b - 0.5 * x * x * a) / binf);
    c2.ratios.push_back(x * a * p * mu_bar * mu_bar / binf);
    double num = (2.0 / mu_bar) * (b - 0.5 * x * x * a) + (1.0 - 2.0 * l) * x;
    double den = (2.0 / mu_bar) * binf + (1.0 - 2.0 * linf) * x;
    c3.ratios.push_back(den != 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN());
  }
  for (auto* c : {&c1p, &c1m, &c2, &c3}) {
    for (double v : c->ratios) {
      double dev = std::isnan(v) ? std::numeric_limits<double>::infinity() : std::abs(v - c->limit);
      c->max_deviation = std::max(c->max_deviation, dev);
    }
    rep.checks.push_back(*c);
  }
  return rep;
}

TailFit fit_log_tail(const WealthDistribution& dist, double floor) {
  dist.validate();
  require(finite(floor) && floor > 0.0 && floor < 1.0, Errc::argument, "tail fit: floor must lie in (0, 1)");
  const double delta = dist.delta();
  std::size_t r = top_resolved(dist.density, floor);
  double x_hi = dist.grid[r] + delta;
  double x_lo = x_hi / 10.0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i <= r; ++i) {
    double x = dist.grid[i] + delta;
    if (x >= x_lo && dist.density[i] > 0.0) {
      xs.push_back(x);
      ys.push_back(-std::log(dist.density[i]));
    }
  }
  require(xs.size() >= 3, Errc::discretization, "tail fit: fewer than three resolved nodes in the top decade");
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd m(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = xs[static_cast<std::size_t>(i)] / x_hi;
    m(i, 0) = s * s;
    m(i, 1) = s;
    m(i, 2) = 1.0;
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd c = m.colPivHouseholderQr().solve(y);
  TailFit fit;
  fit.quadratic = c(0) / (x_hi * x_hi);
  fit.linear = c(1) / x_hi;
  fit.constant = c(2);
  fit.x_lo = x_lo;
  fit.x_hi = x_hi;
  fit.points = xs.size();
  return fit;
}

}  // namespace awm

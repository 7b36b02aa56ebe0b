// SPDX-License-Identifier: Apache-2.0
#include "awm/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "awm/error.hpp"
#include "awm/io.hpp"
#include "awm/rng.hpp"

namespace awm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(double v) { return std::isfinite(v); }

LorenzCurve with_origin(const LorenzCurve& c) {
  require(!c.empty(), Errc::argument, "Lorenz curve is empty");
  if (c.front().f == 0.0) return c;
  LorenzCurve out;
  out.reserve(c.size() + 1);
  out.push_back({0.0, 0.0});
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

void check_curve(const LorenzCurve& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    require(finite(c[i].f) && finite(c[i].l), Errc::argument, "Lorenz curve has a non-finite point");
    require(c[i].f >= 0.0 && c[i].f <= 1.0, Errc::argument, "Lorenz curve F outside [0, 1]");
    if (i) require(c[i].f >= c[i - 1].f, Errc::argument, "Lorenz curve F must be nondecreasing");
  }
  require(c.back().f == 1.0, Errc::argument, "Lorenz curve must end at F = 1");
}

// Value just right of f (last point at a repeated knot).
double value_right(const LorenzCurve& c, double f) {
  auto it = std::upper_bound(c.begin(), c.end(), f, [](double v, const LorenzPoint& p) { return v < p.f; });
  std::size_t i = static_cast<std::size_t>(it - c.begin());
  if (i == 0) return c.front().l;
  --i;
  if (c[i].f == f || i + 1 >= c.size()) return c[i].l;
  double t = (f - c[i].f) / (c[i + 1].f - c[i].f);
  return c[i].l + t * (c[i + 1].l - c[i].l);
}

// Value just left of f (first point at a repeated knot).
double value_left(const LorenzCurve& c, double f) {
  auto it = std::lower_bound(c.begin(), c.end(), f, [](const LorenzPoint& p, double v) { return p.f < v; });
  std::size_t j = static_cast<std::size_t>(it - c.begin());
  if (j >= c.size()) return c.back().l;
  if (c[j].f == f || j == 0) return c[j].l;
  double t = (f - c[j - 1].f) / (c[j].f - c[j - 1].f);
  return c[j - 1].l + t * (c[j].l - c[j - 1].l);
}

double abs_linear_integral(double d0, double d1, double len) {
  if ((d0 >= 0.0) == (d1 >= 0.0) || d0 == 0.0 || d1 == 0.0) return 0.5 * (std::abs(d0) + std::abs(d1)) * len;
  // the difference crosses zero inside the interval
  return 0.5 * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1)) * len;
}

double segment_distance(const LorenzPoint& p, const LorenzPoint& a, const LorenzPoint& b) {
  double vx = b.f - a.f, vy = b.l - a.l;
  double wx = p.f - a.f, wy = p.l - a.l;
  double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
  double dx = wx - t * vx, dy = wy - t * vy;
  return std::hypot(dx, dy);
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

using Key = std::pair<std::int64_t, std::int64_t>;

Key quantize(double chi, double zeta) {
  return {static_cast<std::int64_t>(std::llround(chi * 1e4)), static_cast<std::int64_t>(std::llround(zeta * 1e4))};
}

struct MemoEntry {
  bool ok = false;
  std::string error;
  ShiftedSolution solution;
};

class Memo {
 public:
  std::shared_ptr<const MemoEntry> get(const Key& k, const FitConfig& cfg) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = store_.find(k);
      if (it != store_.end()) return it->second;
    }
    auto e = std::make_shared<MemoEntry>();
    try {
      e->solution = solve_shifted(static_cast<double>(k.first) / 1e4, static_cast<double>(k.second) / 1e4, cfg);
      e->ok = true;
    } catch (const Error& err) {
      e->error = err.what();
    }
    std::lock_guard<std::mutex> lock(mu_);
    return store_.emplace(k, std::move(e)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<Key, std::shared_ptr<const MemoEntry>> store_;
};

struct Eval {
  double j = kInf;
  double lambda = 0.0;
  bool ok = false;
  std::string error;
};

// The model curve at lambda is L0(F) + lambda (L0(F) - F) with L0 the lambda = 0
// curve, so J(lambda) is convex and every term is precomputed on the union knots.
struct LambdaProfile {
  std::vector<double> len, a0, b0, a1, b1;

  LambdaProfile(const LorenzCurve& emp0, const LorenzCurve& model0) {
    LorenzCurve e = with_origin(emp0), m = with_origin(model0);
    std::vector<double> knots;
    knots.reserve(e.size() + m.size());
    for (const auto& p : e) knots.push_back(p.f);
    for (const auto& p : m) knots.push_back(p.f);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      double u = knots[k], v = knots[k + 1];
      double mu = value_right(m, u), mv = value_left(m, v);
      len.push_back(v - u);
      a0.push_back(value_right(e, u) - mu);
      b0.push_back(mu - u);
      a1.push_back(value_left(e, v) - mv);
      b1.push_back(mv - v);
    }
  }

  double operator()(double lambda) const {
    double j = 0.0;
    for (std::size_t k = 0; k < len.size(); ++k)
      j += abs_linear_integral(a0[k] - lambda * b0[k], a1[k] - lambda * b1[k], len[k]);
    return j;
  }
};

Eval profile_lambda(const ShiftedSolution& s, const EmpiricalLorenz& emp, const FitConfig& cfg) {
  const auto& box = cfg.box;
  double hi = box.lambda_max;
  if (s.condensed_shifted > 0.0) hi = std::min(hi, 1.0 / s.condensed_shifted - 1.0);
  Eval e;
  if (hi < box.lambda_min) {
    e.error = "no feasible lambda in the search box";
    return e;
  }
  LambdaProfile jf(emp.points, model_lorenz(s.dist));
  const int n = std::max(3, cfg.lambda_scan);
  double best_l = box.lambda_min, best_j = kInf;
  std::vector<double> lam(static_cast<std::size_t>(n)), jv(static_cast<std::size_t>(n));
  std::size_t best = 0;
  for (int k = 0; k < n; ++k) {
    auto i = static_cast<std::size_t>(k);
    lam[i] = box.lambda_min + (hi - box.lambda_min) * k / (n - 1);
    jv[i] = jf(lam[i]);
    if (jv[i] < jv[best]) best = i;
  }
  double a = lam[best == 0 ? 0 : best - 1];
  double b = lam[std::min(best + 1, lam.size() - 1)];
  best_l = lam[best];
  best_j = jv[best];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = jf(c), fd = jf(d);
  for (int it = 0; it < 60 && b - a > 1e-9; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = jf(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = jf(d);
    }
  }
  for (auto [lv, jvv] : {std::pair{c, fc}, std::pair{d, fd}}) {
    if (jvv < best_j) {
      best_j = jvv;
      best_l = lv;
    }
  }
  e.ok = finite(best_j);
  e.j = best_j;
  e.lambda = best_l;
  if (!e.ok) e.error = "objective is not finite";
  return e;
}

struct Objective {
  const EmpiricalLorenz& emp;
  const FitConfig& cfg;
  Memo& memo;

  Eval operator()(double chi, double zeta) const {
    auto k = quantize(chi, zeta);
    auto entry = memo.get(k, cfg);
    if (!entry->ok) {
      Eval e;
      e.error = entry->error;
      return e;
    }
    return profile_lambda(entry->solution, emp, cfg);
  }
};

struct Vertex {
  double chi = 0.0;
  double zeta = 0.0;
  Eval e;
};

bool better(const Vertex& a, const Vertex& b) {
  if (a.e.j != b.e.j) return a.e.j < b.e.j;
  return std::tie(a.chi, a.zeta) < std::tie(b.chi, b.zeta);
}

StartTrace nelder_mead(double chi0, double zeta0, const Objective& obj, const FitConfig& cfg) {
  const auto& box = cfg.box;
  StartTrace tr;
  tr.chi_start = chi0;
  tr.zeta_start = zeta0;
  auto clamp_chi = [&](double v) { return std::clamp(v, box.chi_min, box.chi_max); };
  auto clamp_zeta = [&](double v) { return std::clamp(v, box.zeta_min, box.zeta_max); };
  auto eval = [&](double c, double z) {
    Vertex v{clamp_chi(c), clamp_zeta(z), {}};
    v.e = obj(v.chi, v.zeta);
    ++tr.evaluations;
    if (!v.e.ok) {
      ++tr.failures;
      tr.last_error = v.e.error;
    }
    return v;
  };
  double hc = 0.1 * (box.chi_max - box.chi_min), hz = 0.1 * (box.zeta_max - box.zeta_min);
  double c1 = chi0 + hc <= box.chi_max ? chi0 + hc : chi0 - hc;
  double z2 = zeta0 + hz <= box.zeta_max ? zeta0 + hz : zeta0 - hz;
  std::array<Vertex, 3> s{eval(chi0, zeta0), eval(c1, zeta0), eval(chi0, z2)};
  while (tr.evaluations < cfg.max_evaluations) {
    std::sort(s.begin(), s.end(), better);
    double size = 0.0;
    for (int i = 1; i < 3; ++i)
      size = std::max(size, std::max(std::abs(s[i].chi - s[0].chi), std::abs(s[i].zeta - s[0].zeta)));
    if (size < cfg.simplex_tol) break;
    double mc = 0.5 * (s[0].chi + s[1].chi), mz = 0.5 * (s[0].zeta + s[1].zeta);
    Vertex r = eval(mc + (mc - s[2].chi), mz + (mz - s[2].zeta));
    if (better(r, s[0])) {
      Vertex x = eval(mc + 2.0 * (mc - s[2].chi), mz + 2.0 * (mz - s[2].zeta));
      s[2] = better(x, r) ? x : r;
    } else if (better(r, s[1])) {
      s[2] = r;
    } else {
      bool outside = better(r, s[2]);
      Vertex k = outside ? eval(mc + 0.5 * (r.chi - mc), mz + 0.5 * (r.zeta - mz))
                         : eval(mc + 0.5 * (s[2].chi - mc), mz + 0.5 * (s[2].zeta - mz));
      if (better(k, outside ? r : s[2])) {
        s[2] = k;
      } else {
        for (int i = 1; i < 3; ++i)
          s[static_cast<std::size_t>(i)] =
              eval(s[0].chi + 0.5 * (s[i].chi - s[0].chi), s[0].zeta + 0.5 * (s[i].zeta - s[0].zeta));
      }
    }
  }
  std::sort(s.begin(), s.end(), better);
  tr.chi = s[0].chi;
  tr.zeta = s[0].zeta;
  tr.lambda = s[0].e.lambda;
  tr.j = s[0].e.j;
  return tr;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void EmpiricalLorenz::validate() const {
  require(!points.empty(), Errc::argument, "empirical Lorenz curve is empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    require(finite(p.f) && finite(p.l), Errc::argument, "empirical Lorenz curve has a non-finite point");
    require(p.f > 0.0 && p.f <= 1.0, Errc::argument, "empirical Lorenz F must lie in (0, 1]");
    if (i) require(p.f > points[i - 1].f, Errc::argument, "empirical Lorenz F must be strictly increasing");
  }
  require(points.back().f == 1.0 && std::abs(points.back().l - 1.0) <= 1e-12, Errc::argument,
          "empirical Lorenz curve must end at (1, 1)");
}

EmpiricalLorenz survey_lorenz(const std::vector<double>& wealth, const std::vector<double>& weight,
                              const std::vector<std::size_t>& lines, const std::string& source) {
  require(wealth.size() == weight.size(), Errc::argument, "survey: wealth and weight sizes differ");
  require(wealth.size() >= 2, Errc::argument, "survey: at least two records are required");
  auto where = [&](std::size_t i) {
    std::string s = source.empty() ? "record" : source;
    return s + ":" + std::to_string(i < lines.size() ? lines[i] : i + 1);
  };
  for (std::size_t i = 0; i < wealth.size(); ++i) {
    if (!finite(wealth[i])) fail(Errc::parse, where(i) + ": non-finite wealth");
    if (!finite(weight[i]) || weight[i] <= 0.0) fail(Errc::record, where(i) + ": weight must be > 0");
  }
  std::vector<std::size_t> idx(wealth.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return wealth[a] < wealth[b]; });
  double tw = 0.0, tx = 0.0;
  for (std::size_t i : idx) {
    tw += weight[i];
    tx += weight[i] * wealth[i];
  }
  require(tx > 0.0, Errc::record, "survey: total weighted wealth must be > 0");
  EmpiricalLorenz e;
  e.source = source;
  e.weighted = std::any_of(weight.begin(), weight.end(), [&](double w) { return w != weight.front(); });
  double cw = 0.0, cx = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    cw += weight[idx[k]];
    cx += weight[idx[k]] * wealth[idx[k]];
    e.points.push_back({cw / tw, cx / tx});
  }
  e.points.back() = {1.0, 1.0};
  e.validate();
  return e;
}

EmpiricalLorenz load_survey(const std::string& path) {
  auto t = read_csv(path, {"wealth", "weight"});
  std::vector<double> w, v;
  for (const auto& r : t.rows) {
    w.push_back(r[0]);
    v.push_back(r[1]);
  }
  return survey_lorenz(w, v, t.line_numbers, path);
}

EmpiricalLorenz load_lorenz_points(const std::string& path) {
  auto t = read_csv(path, {"F", "L"});
  EmpiricalLorenz e;
  e.source = path;
  e.weighted = false;
  for (const auto& r : t.rows) {
    if (r[0] == 0.0 && r[1] == 0.0 && e.points.empty()) continue;
    e.points.push_back({r[0], r[1]});
  }
  e.validate();
  return e;
}

double discrepancy(const LorenzCurve& a0, const LorenzCurve& b0) {
  require(!a0.empty() && !b0.empty(), Errc::argument, "discrepancy: empty curve");
  LorenzCurve a = with_origin(a0), b = with_origin(b0);
  check_curve(a);
  check_curve(b);
  std::vector<double> knots;
  knots.reserve(a.size() + b.size());
  for (const auto& p : a) knots.push_back(p.f);
  for (const auto& p : b) knots.push_back(p.f);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double j = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    double u = knots[k], v = knots[k + 1];
    double d0 = value_right(a, u) - value_right(b, u);
    double d1 = value_left(a, v) - value_left(b, v);
    j += abs_linear_integral(d0, d1, v - u);
  }
  return j;
}

double discrepancy(const EmpiricalLorenz& empirical, const LorenzCurve& model) {
  return discrepancy(empirical.points, model);
}

double local_error(const LorenzPoint& point, const LorenzCurve& model) {
  require(model.size() >= 2, Errc::argument, "local error: model curve needs at least two points");
  double best = kInf;
  for (std::size_t i = 0; i + 1 < model.size(); ++i)
    best = std::min(best, segment_distance(point, model[i], model[i + 1]));
  return best;
}

std::vector<double> local_errors(const EmpiricalLorenz& empirical, const LorenzCurve& model) {
  std::vector<double> out;
  out.reserve(empirical.points.size());
  for (const auto& p : empirical.points) out.push_back(local_error(p, model));
  return out;
}

double lorenz_value(const LorenzCurve& curve, double f) {
  require(!curve.empty(), Errc::argument, "Lorenz curve is empty");
  return value_left(with_origin(curve), f);
}

LorenzCurve model_lorenz(const WealthDistribution& dist) {
  auto c = lorenz_curve(dist);
  if (dist.condensed_fraction > 0.0) c.push_back({1.0, 1.0});
  return c;
}

EmpiricalLorenz sample_lorenz(const LorenzCurve& model, int count, const std::string& source) {
  require(count >= 2, Errc::argument, "sample_lorenz: count must be >= 2");
  LorenzCurve m = with_origin(model);
  check_curve(m);
  EmpiricalLorenz e;
  e.source = source;
  e.weighted = false;
  for (int j = 1; j < count; ++j) {
    double f = static_cast<double>(j) / count;
    e.points.push_back({f, value_left(m, f)});
  }
  e.points.push_back({1.0, 1.0});
  e.validate();
  return e;
}

void SearchBox::validate() const {
  require(finite(chi_min) && finite(chi_max) && chi_min > 0.0 && chi_max > chi_min, Errc::parameter,
          "search box: need 0 < chi_min < chi_max");
  require(finite(zeta_min) && finite(zeta_max) && zeta_min > 0.0 && zeta_max > zeta_min, Errc::parameter,
          "search box: need 0 < zeta_min < zeta_max");
  require(finite(lambda_min) && finite(lambda_max) && lambda_min >= 0.0 && lambda_max > lambda_min,
          Errc::parameter, "search box: need 0 <= lambda_min < lambda_max");
}

ShiftedSolution solve_shifted(double chi, double zeta, const FitConfig& config) {
  auto n = config.n_agents;
  auto params = ModelParams::make(zeta, 0.0, n, static_cast<double>(n));
  auto rep = steady_state(params, RedistributionPolicy::flat(chi), config.solver);
  if (!rep.converged)
    fail(Errc::fit_failed, "steady state did not converge at chi=" + format_double(chi) +
                               ", zeta=" + format_double(zeta) + " (residual " + format_double(rep.residual) + ")");
  ShiftedSolution s;
  s.dist = std::move(rep.distribution);
  s.condensed_shifted = s.dist.condensed_fraction;
  return s;
}

WealthDistribution at_lambda(const ShiftedSolution& s, double lambda) {
  require(finite(lambda) && lambda >= 0.0, Errc::parameter, "lambda must be >= 0");
  double c = (1.0 + lambda) * s.condensed_shifted;
  if (c > 1.0) fail(Errc::infeasible, "condensed fraction exceeds total wealth at this lambda");
  const double delta = lambda / (1.0 + lambda);
  WealthDistribution d = s.dist;
  for (double& g : d.grid) g -= delta;
  d.grid.front() = -delta;
  d.total_wealth = s.dist.n_agents / (1.0 + lambda);
  d.condensed_fraction = c;
  d.lambda = lambda;
  return d;
}

LorenzCurve model_lorenz(double chi, double zeta, double lambda, const FitConfig& config) {
  return model_lorenz(at_lambda(solve_shifted(chi, zeta, config), lambda));
}

FitResult fit(const EmpiricalLorenz& empirical, const FitConfig& config) {
  empirical.validate();
  config.box.validate();
  require(config.starts >= 1 && config.max_evaluations >= 4 && config.jobs >= 1 && config.simplex_tol > 0.0,
          Errc::argument, "fit: invalid search budget");
  Memo memo;
  Objective obj{empirical, config, memo};
  const auto& box = config.box;
  Rng rng(config.seed);
  const std::uint64_t offset = rng.below(1u << 20);
  std::vector<std::pair<double, double>> starts;
  for (int k = 0; k < config.starts; ++k) {
    auto i = offset + static_cast<std::uint64_t>(k) + 1;
    starts.emplace_back(box.chi_min + (box.chi_max - box.chi_min) * radical_inverse(i, 2),
                        box.zeta_min + (box.zeta_max - box.zeta_min) * radical_inverse(i, 3));
  }
  std::vector<StartTrace> traces(starts.size());
  auto run_start = [&](std::size_t k) { traces[k] = nelder_mead(starts[k].first, starts[k].second, obj, config); };
  if (config.jobs == 1) {
    for (std::size_t k = 0; k < starts.size(); ++k) run_start(k);
  } else {
    std::mutex qm;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    auto worker = [&] {
      while (true) {
        std::size_t k;
        {
          std::lock_guard<std::mutex> lock(qm);
          if (next >= starts.size()) return;
          k = next++;
        }
        run_start(k);
      }
    };
    int n = std::min<int>(config.jobs, static_cast<int>(starts.size()));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  FitResult r;
  r.starts = traces;
  r.source = empirical.source;
  r.seed = config.seed;
  const StartTrace* best = nullptr;
  for (const auto& t : traces) {
    r.evaluations += t.evaluations;
    r.failed_evaluations += t.failures;
    if (!finite(t.j)) continue;
    if (!best || t.j < best->j || (t.j == best->j && std::tie(t.chi, t.zeta, t.lambda) <
                                                         std::tie(best->chi, best->zeta, best->lambda)))
      best = &t;
  }
  if (!best) {
    std::string diag;
    for (std::size_t k = 0; k < traces.size(); ++k)
      diag += "; start " + std::to_string(k) + ": " + (traces[k].last_error.empty() ? "no finite objective" : traces[k].last_error);
    fail(Errc::fit_failed, "fit: every objective evaluation failed" + diag);
  }
  r.chi = best->chi;
  r.zeta = best->zeta;
  r.lambda = best->lambda;
  r.j = best->j;
  auto entry = memo.get(quantize(r.chi, r.zeta), config);
  auto dist = at_lambda(entry->solution, r.lambda);
  auto curve = model_lorenz(dist);
  r.gini = gini(dist);
  auto errs = local_errors(empirical, curve);
  r.avg_local_error = std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(errs.size());
  r.criticality_ratio = r.chi / r.zeta;
  r.oligarch_c = dist.condensed_fraction;
  auto near = [](double v, double lo, double hi) { return std::abs(v - lo) <= 1e-3 * (hi - lo) || std::abs(hi - v) <= 1e-3 * (hi - lo); };
  if (near(r.chi, box.chi_min, box.chi_max)) r.boundary_parameters.push_back("chi");
  if (near(r.zeta, box.zeta_min, box.zeta_max)) r.boundary_parameters.push_back("zeta");
  if (near(r.lambda, box.lambda_min, box.lambda_max)) r.boundary_parameters.push_back("lambda");
  r.boundary_hit = !r.boundary_parameters.empty();
  return r;
}

std::string fit_result_json(const FitResult& r) {
  nlohmann::ordered_json j;
  j["chi_opt"] = r.chi;
  j["zeta_opt"] = r.zeta;
  j["lambda_opt"] = r.lambda;
  j["J"] = r.j;
  j["G_fit"] = r.gini;
  j["avg_local_error"] = r.avg_local_error;
  j["criticality_ratio"] = r.criticality_ratio;
  j["oligarch_c"] = r.oligarch_c;
  j["boundary_hit"] = r.boundary_hit;
  j["boundary_parameters"] = r.boundary_parameters;
  j["evaluations"] = r.evaluations;
  j["failed_evaluations"] = r.failed_evaluations;
  j["source"] = r.source;
  j["seed"] = r.seed;
  auto starts = nlohmann::ordered_json::array();
  for (const auto& t : r.starts) {
    nlohmann::ordered_json s;
    s["chi_start"] = t.chi_start;
    s["zeta_start"] = t.zeta_start;
    s["chi"] = t.chi;
    s["zeta"] = t.zeta;
    s["lambda"] = t.lambda;
    s["J"] = finite(t.j) ? nlohmann::ordered_json(t.j) : nlohmann::ordered_json(nullptr);
    s["evaluations"] = t.evaluations;
    s["failures"] = t.failures;
    if (!t.last_error.empty()) s["last_error"] = t.last_error;
    starts.push_back(s);
  }
  j["starts"] = starts;
  return j.dump(2) + "\n";
}

FitResult parse_fit_result(const std::string& text) {
  FitResult r;
  try {
    auto j = nlohmann::json::parse(text);
    r.chi = j.at("chi_opt").get<double>();
    r.zeta = j.at("zeta_opt").get<double>();
    r.lambda = j.at("lambda_opt").get<double>();
    r.j = j.at("J").get<double>();
    r.gini = j.at("G_fit").get<double>();
    r.avg_local_error = j.at("avg_local_error").get<double>();
    r.criticality_ratio = j.value("criticality_ratio", r.chi / r.zeta);
    r.oligarch_c = j.value("oligarch_c", 0.0);
    r.boundary_hit = j.value("boundary_hit", false);
    if (j.contains("boundary_parameters")) r.boundary_parameters = j["boundary_parameters"].get<std::vector<std::string>>();
    r.evaluations = j.value("evaluations", 0);
    r.failed_evaluations = j.value("failed_evaluations", 0);
    r.source = j.value("source", std::string());
    r.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, std::string("fit result: ") + e.what());
  }
  return r;
}

std::string criticality_table_csv(const std::vector<CriticalityRow>& rows) {
  std::string s = "label,chi_opt,zeta_opt,lambda_opt,G_fit,avg_local_error_pct\n";
  for (const auto& r : rows)
    s += r.label + "," + fixed(r.chi, 3) + "," + fixed(r.zeta, 3) + "," + fixed(r.lambda, 3) + "," +
         fixed(r.gini, 3) + "," + fixed(100.0 * r.avg_local_error, 2) + "\n";
  return s;
}

std::string criticality_scatter_csv(const std::vector<CriticalityRow>& rows) {
  std::string s = "zeta_opt,chi_opt\n";
  for (const auto& r : rows) s += format_double(r.zeta) + "," + format_double(r.chi) + "\n";
  return s;
}

std::string reference_line_csv(const std::vector<CriticalityRow>& rows) {
  double hi = 0.0;
  for (const auto& r : rows) hi = std::max({hi, r.chi, r.zeta});
  hi = hi > 0.0 ? 1.1 * hi : 1.0;
  return "zeta,chi\n0,0\n" + format_double(hi) + "," + format_double(hi) + "\n";
}

}  // namespace awm

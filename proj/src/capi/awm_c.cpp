// SPDX-License-Identifier: Apache-2.0
#include "awm/awm.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "awm/asymptotics.hpp"
#include "awm/error.hpp"
#include "awm/fitting.hpp"
#include "awm/fokker_planck.hpp"
#include "awm/io.hpp"
#include "awm/kinetics.hpp"
#include "awm/model.hpp"
#include "awm/rng.hpp"
#include "awm/version.hpp"

struct awm_policy {
  awm::RedistributionPolicy p;
};

struct awm_distribution {
  awm::WealthDistribution d;
};

struct awm_run {
  awm::RunResult r;
  awm::ModelParams params;
};

struct awm_lorenz {
  awm::EmpiricalLorenz e;
};

namespace {

using json = nlohmann::ordered_json;

thread_local std::string g_last_error;

awm_status to_status(awm::Errc c) {
  return static_cast<awm_status>(static_cast<int>(c) + 1);
}

template <class F>
awm_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AWM_OK;
  } catch (const awm::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("request: ") + e.what();
    return AWM_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AWM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AWM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return AWM_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) awm::fail(awm::Errc::argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_request(const char* text) {
  if (!text || !*text) return json::object();
  json j = json::parse(text);
  if (!j.is_object()) awm::fail(awm::Errc::parse, "request must be a JSON object");
  return j;
}

// NaN and infinities are not JSON numbers; they are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

awm::ModelParams params_from(const json& rq, double default_n) {
  auto n = rq.value("n_agents", static_cast<std::int64_t>(default_n));
  double w = rq.value("total_wealth", static_cast<double>(n));
  return awm::ModelParams::make(rq.at("zeta").get<double>(), rq.value("lambda", 0.0), n, w);
}

awm::GridSpec grid_from(const json& rq, awm::GridSpec g) {
  g.nodes = rq.value("nodes", g.nodes);
  g.x_max = rq.value("x_max", g.x_max);
  g.x_core = rq.value("x_core", g.x_core);
  return g;
}

awm::MomentInputs moments_from(const json& rq) {
  awm::MomentInputs m;
  m.b_inf = rq.value("b_inf", m.b_inf);
  m.l_inf = rq.value("l_inf", m.l_inf);
  m.t_over_n = rq.value("t_over_n", m.t_over_n);
  m.mu_bar = rq.value("mu_bar", m.mu_bar);
  m.delta = rq.value("delta", m.delta);
  m.zeta = rq.value("zeta", m.zeta);
  m.d = rq.value("d", m.d);
  m.validate();
  return m;
}

json moments_json(const awm::MomentInputs& m) {
  json j;
  j["b_inf"] = m.b_inf;
  j["l_inf"] = m.l_inf;
  j["t_over_n"] = m.t_over_n;
  j["mu_bar"] = m.mu_bar;
  j["delta"] = m.delta;
  j["zeta"] = m.zeta;
  j["d"] = m.d;
  return j;
}

struct TailChoice {
  awm::TailFunction tail;
  bool has_family = false;
  awm::Family family = awm::Family::exponential;
};

TailChoice tail_from(const json& rq) {
  using awm::TailFunction;
  const std::string name = rq.at("tail").get<std::string>();
  TailChoice c;
  auto fam = [&](awm::Family f) {
    c.has_family = true;
    c.family = f;
  };
  if (name == "exponential") {
    c.tail = TailFunction::exponential(rq.value("rate", 1.0));
    fam(awm::Family::exponential);
  } else if (name == "lognormal") {
    c.tail = TailFunction::lognormal(rq.value("sigma", 1.0));
    fam(awm::Family::lognormal);
  } else if (name == "pareto") {
    c.tail = TailFunction::pareto(rq.value("alpha", 1.0));
    fam(awm::Family::pareto);
  } else if (name == "inverse-gamma") {
    c.tail = TailFunction::inverse_gamma(rq.value("alpha", 1.0), rq.value("beta", 1.0));
    fam(awm::Family::inverse_gamma);
  } else if (name == "gaussian") {
    c.tail = TailFunction::gaussian(rq.value("sigma", 1.0));
    fam(awm::Family::gaussian);
  } else if (name == "higher-order-gaussian" || name == "hog") {
    c.tail = TailFunction::higher_order_gaussian(rq.value("m", 2.0), rq.value("sigma", 1.0));
    fam(awm::Family::higher_order_gaussian);
  } else if (name == "power-log") {
    c.tail = TailFunction::power_log(rq.value("a", 1.0), rq.value("p", 1.0), rq.value("q", 0.0));
  } else if (name == "loglog") {
    c.tail = TailFunction::power_log(1.0, 0.0, 1.0);
  } else {
    awm::fail(awm::Errc::argument, "unknown tail '" + name + "'");
  }
  return c;
}

json distribution_summary(const awm::WealthDistribution& d) {
  json j;
  j["nodes"] = d.size();
  j["n_agents"] = d.n_agents;
  j["total_wealth"] = d.total_wealth;
  j["lambda"] = d.lambda;
  j["delta"] = d.delta();
  j["condensed_fraction"] = d.condensed_fraction;
  j["gini"] = num(awm::gini(d));
  return j;
}

std::string lorenz_csv(const awm::LorenzCurve& c) {
  std::string s = "F,L\n";
  for (const auto& p : c) s += awm::format_double(p.f) + "," + awm::format_double(p.l) + "\n";
  return s;
}

}  // namespace

extern "C" {

const char* awm_version(void) { return awm::kVersion; }
const char* awm_schema_version(void) { return awm::kSchemaVersion; }
const char* awm_rng_algorithm(void) { return awm::Rng::kAlgorithm; }

const char* awm_status_name(awm_status status) {
  if (status == AWM_OK) return "ok";
  if (status == AWM_ERR_INTERNAL) return "internal";
  int k = static_cast<int>(status) - 1;
  if (k < 0 || k > static_cast<int>(awm::Errc::io)) return "unknown";
  return awm::errc_name(static_cast<awm::Errc>(k));
}

const char* awm_last_error(void) { return g_last_error.c_str(); }

void awm_string_free(char* s) { std::free(s); }

awm_status awm_policy_parse(const char* spec, double default_zeta, awm_policy** out) {
  return guard([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new awm_policy{awm::parse_policy_spec(spec, default_zeta)};
  });
}

awm_status awm_policy_eval(const awm_policy* policy, double w, double* out) {
  return guard([&] {
    need(policy, "policy");
    need(out, "out");
    *out = policy->p(w);
  });
}

awm_status awm_policy_asymptotic(const awm_policy* policy, double* out) {
  return guard([&] {
    need(policy, "policy");
    need(out, "out");
    *out = policy->p.asymptotic();
  });
}

awm_status awm_policy_describe(const awm_policy* policy, char** out) {
  return guard([&] {
    need(policy, "policy");
    need(out, "out");
    *out = dup(policy->p.describe());
  });
}

void awm_policy_free(awm_policy* policy) { delete policy; }

awm_status awm_distribution_read(const char* csv_path, const char* json_path, awm_distribution** out) {
  return guard([&] {
    need(csv_path, "csv_path");
    need(json_path, "json_path");
    need(out, "out");
    *out = new awm_distribution{awm::read_distribution(csv_path, json_path)};
  });
}

awm_status awm_distribution_write(const awm_distribution* dist, const char* csv_path, const char* json_path) {
  return guard([&] {
    need(dist, "dist");
    need(csv_path, "csv_path");
    need(json_path, "json_path");
    awm::write_distribution(dist->d, csv_path, json_path);
  });
}

awm_status awm_distribution_summary(const awm_distribution* dist, char** out) {
  return guard([&] {
    need(dist, "dist");
    need(out, "out");
    *out = dup(distribution_summary(dist->d).dump(2) + "\n");
  });
}

awm_status awm_distribution_lorenz_csv(const awm_distribution* dist, int count, char** out) {
  return guard([&] {
    need(dist, "dist");
    need(out, "out");
    auto e = awm::sample_lorenz(awm::model_lorenz(dist->d), count);
    awm::LorenzCurve c{{0.0, 0.0}};
    c.insert(c.end(), e.points.begin(), e.points.end());
    *out = dup(lorenz_csv(c));
  });
}

void awm_distribution_free(awm_distribution* dist) { delete dist; }

awm_status awm_steady_state(const char* request_json, const awm_policy* policy, awm_distribution** dist,
                            char** report_json) {
  return guard([&] {
    need(policy, "policy");
    need(dist, "dist");
    need(report_json, "report_json");
    json rq = parse_request(request_json);
    auto params = params_from(rq, 10000);
    awm::SolverConfig cfg;
    cfg.grid = grid_from(rq, cfg.grid);
    cfg.dt = rq.value("dt", cfg.dt);
    cfg.max_steps = rq.value("max_steps", cfg.max_steps);
    cfg.steady_tol = rq.value("steady_tol", cfg.steady_tol);
    std::string stepping = rq.value("stepping", std::string("implicit"));
    if (stepping == "implicit")
      cfg.stepping = awm::Stepping::implicit;
    else if (stepping == "explicit")
      cfg.stepping = awm::Stepping::explicit_euler;
    else
      awm::fail(awm::Errc::argument, "stepping must be implicit or explicit");
    std::string flux = rq.value("flux", std::string("chang-cooper"));
    if (flux == "chang-cooper")
      cfg.flux = awm::FluxScheme::chang_cooper;
    else if (flux == "upwind")
      cfg.flux = awm::FluxScheme::upwind;
    else
      awm::fail(awm::Errc::argument, "flux must be chang-cooper or upwind");

    auto rep = awm::steady_state(params, policy->p, cfg);
    double chi_inf = policy->p.asymptotic();
    json j;
    j["converged"] = rep.converged;
    j["steps"] = rep.steps;
    j["time"] = rep.time;
    j["residual"] = rep.residual;
    j["condensed_fraction"] = rep.distribution.condensed_fraction;
    j["expected_condensed_fraction"] =
        num(std::isfinite(chi_inf) ? awm::oligarch_fraction_awm(chi_inf, params.zeta, params.lambda)
                                   : std::numeric_limits<double>::quiet_NaN());
    j["condensed_flux_total"] = rep.condensed_flux_total;
    j["gini"] = num(awm::gini(rep.distribution));
    j["policy"] = policy->p.describe();
    j["zeta"] = params.zeta;
    j["lambda"] = params.lambda;
    j["n_agents"] = params.n_agents;
    j["total_wealth"] = params.total_wealth;
    j["grid"] = {{"nodes", cfg.grid.nodes}, {"x_max", cfg.grid.x_max}, {"x_core", cfg.grid.x_core}};
    j["dt"] = cfg.dt;
    j["max_steps"] = cfg.max_steps;
    j["steady_tol"] = cfg.steady_tol;
    j["stepping"] = stepping;
    j["flux"] = flux;
    auto d = std::make_unique<awm_distribution>(awm_distribution{std::move(rep.distribution)});
    *report_json = dup(j.dump(2) + "\n");
    *dist = d.release();
  });
}

awm_status awm_simulate(const char* request_json, const awm_policy* policy, awm_run** out) {
  return guard([&] {
    need(policy, "policy");
    need(out, "out");
    json rq = parse_request(request_json);
    auto params = params_from(rq, 1000);
    awm::SimConfig cfg;
    cfg.dt = rq.value("dt", 0.05);
    cfg.max_stake_fraction = rq.value("kappa", 0.5);
    cfg.sweeps = rq.value("sweeps", cfg.sweeps);
    cfg.seed = rq.value("seed", cfg.seed);
    cfg.snapshot_stride = rq.value("snapshot_stride", cfg.snapshot_stride);
    cfg.keep_snapshots = rq.value("keep_snapshots", cfg.keep_snapshots);
    cfg.average_from = rq.value("average_from", cfg.average_from);
    cfg.bias_overflow = rq.value("bias_overflow", cfg.bias_overflow);
    cfg.histogram_grid = grid_from(rq, cfg.histogram_grid);
    std::string init = rq.value("init", std::string("equal"));
    awm::AgentEnsemble start;
    if (init == "equal") {
      start = awm::equal_ensemble(params);
    } else if (init == "exponential") {
      awm::Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      start = awm::exponential_ensemble(params, rng);
    } else {
      awm::fail(awm::Errc::argument, "init must be equal or exponential");
    }
    auto r = std::make_unique<awm_run>();
    r->params = params;
    r->r = awm::run(cfg, params, policy->p, std::move(start));
    *out = r.release();
  });
}

awm_status awm_run_summary(const awm_run* run, char** out) {
  return guard([&] {
    need(run, "run");
    need(out, "out");
    const auto& r = run->r;
    json j;
    j["sweeps"] = r.trajectory.empty() ? 0 : r.trajectory.back().sweep;
    j["time"] = r.time;
    j["max_wealth_drift"] = r.max_wealth_drift;
    j["clamp_count"] = r.clamp_count;
    j["floor_repairs"] = r.floor_repairs;
    j["snapshots"] = r.snapshots.size();
    j["averaged_count"] = r.averaged_count;
    if (!r.trajectory.empty()) {
      const auto& t = r.trajectory.back();
      j["final"] = {{"gini", t.gini},
                    {"top1_share", t.top1_share},
                    {"top10_share", t.top10_share},
                    {"total_wealth", t.total_wealth}};
    }
    if (r.averaged_count > 0) j["averaged_condensed_fraction"] = r.averaged.condensed_fraction;
    j["rng"] = awm::Rng::kAlgorithm;
    *out = dup(j.dump(2) + "\n");
  });
}

awm_status awm_run_trajectory_csv(const awm_run* run, char** out) {
  return guard([&] {
    need(run, "run");
    need(out, "out");
    std::string s = "sweep,gini,top1_share,top10_share,total_wealth\n";
    for (const auto& t : run->r.trajectory)
      s += std::to_string(t.sweep) + "," + awm::format_double(t.gini) + "," + awm::format_double(t.top1_share) +
           "," + awm::format_double(t.top10_share) + "," + awm::format_double(t.total_wealth) + "\n";
    *out = dup(s);
  });
}

awm_status awm_run_final_state_csv(const awm_run* run, char** out) {
  return guard([&] {
    need(run, "run");
    need(out, "out");
    std::string s = "agent,wealth\n";
    const auto& w = run->r.final_state.wealths;
    for (std::size_t i = 0; i < w.size(); ++i) s += std::to_string(i) + "," + awm::format_double(w[i]) + "\n";
    *out = dup(s);
  });
}

awm_status awm_run_snapshot_count(const awm_run* run, size_t* count) {
  return guard([&] {
    need(run, "run");
    need(count, "count");
    *count = run->r.snapshots.size();
  });
}

awm_status awm_run_snapshot(const awm_run* run, size_t index, int64_t* sweep, awm_distribution** out) {
  return guard([&] {
    need(run, "run");
    need(out, "out");
    if (index >= run->r.snapshots.size()) awm::fail(awm::Errc::range, "snapshot index out of range");
    const auto& s = run->r.snapshots[index];
    if (sweep) *sweep = s.sweep;
    *out = new awm_distribution{s.distribution};
  });
}

awm_status awm_run_averaged(const awm_run* run, awm_distribution** out) {
  return guard([&] {
    need(run, "run");
    need(out, "out");
    if (run->r.averaged_count == 0) awm::fail(awm::Errc::argument, "no snapshot was averaged");
    *out = new awm_distribution{run->r.averaged};
  });
}

void awm_run_free(awm_run* run) { delete run; }

awm_status awm_tail(const char* request_json, const awm_policy* policy, char** out) {
  return guard([&] {
    need(policy, "policy");
    need(out, "out");
    json rq = parse_request(request_json);
    auto m = moments_from(rq);
    awm::ForwardOptions opt;
    opt.x_ref = rq.value("x_ref", opt.x_ref);
    std::vector<double> ws = rq.at("w").get<std::vector<double>>();
    if (ws.empty()) awm::fail(awm::Errc::argument, "tail: no wealth given");
    json rows = json::array();
    for (double w : ws) {
      auto t = awm::forward_tail_terms(policy->p, m, w, opt);
      rows.push_back({{"w", w},
                      {"f", num(t.total)},
                      {"integral", num(t.integral)},
                      {"quadratic", num(t.quadratic)},
                      {"linear", num(t.linear)}});
    }
    json j;
    j["policy"] = policy->p.describe();
    j["moments"] = moments_json(m);
    j["tail"] = rows;
    *out = dup(j.dump(2) + "\n");
  });
}

awm_status awm_invert(const char* request_json, char** report_json, char** samples_csv) {
  return guard([&] {
    need(report_json, "report_json");
    need(samples_csv, "samples_csv");
    json rq = parse_request(request_json);
    auto m = moments_from(rq);
    auto choice = tail_from(rq);
    auto inv = awm::invert_redistribution(choice.tail, m);

    json j;
    j["tail"] = choice.tail.describe();
    j["moments"] = moments_json(m);
    j["inverse"] = {{"constant", num(inv.constant)},
                    {"limit", num(inv.policy().asymptotic())},
                    {"form", "chi(y) = constant + [B f'(y - Delta) - (2 zeta B - (T/N) mu_bar) / mu_bar + D] / y"}};

    awm::RedistributionPolicy sampled_from = inv.policy();
    double floor = rq.value("floor", std::max(1.0, choice.tail.threshold));
    if (choice.has_family) {
      awm::CatalogueRequest cr;
      cr.family = choice.family;
      cr.alpha = rq.value("alpha", cr.alpha);
      cr.beta = rq.value("beta", cr.beta);
      cr.sigma = rq.value("sigma", cr.sigma);
      cr.m = rq.value("m", cr.m);
      cr.floor = floor;
      cr.literal_table_entry = rq.value("literal", false);
      auto entry = awm::catalogue(cr, m);
      j["family"] = awm::family_name(choice.family);
      j["closed_form"] = entry.policy.describe();
      j["critical"] = entry.critical;
      if (!entry.marker.empty()) j["marker"] = entry.marker;
      if (entry.policy.is_flat()) j["summary"] = "flat, chi = zeta";
      sampled_from = entry.policy;
    }

    double lo = rq.value("grid_lo", std::max(floor, choice.tail.threshold) + m.delta);
    double hi = rq.value("grid_hi", 1e4 * m.mu_bar);
    int n = rq.value("grid_points", 200);
    if (!(lo > 0.0 && hi > lo && n >= 2)) awm::fail(awm::Errc::argument, "invert: need 0 < grid_lo < grid_hi, 2+ points");
    std::vector<double> w(n), chi(n);
    for (int i = 0; i < n; ++i) {
      w[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
      chi[i] = sampled_from(w[i]);
    }
    j["samples"] = {{"grid_lo", lo}, {"grid_hi", hi}, {"grid_points", n}};
    std::string csv = "w,chi\n";
    for (int i = 0; i < n; ++i) csv += awm::format_double(w[i]) + "," + awm::format_double(chi[i]) + "\n";
    std::string rep = j.dump(2) + "\n";
    char* a = dup(rep);
    char* b = nullptr;
    try {
      b = dup(csv);
    } catch (...) {
      std::free(a);
      throw;
    }
    *report_json = a;
    *samples_csv = b;
  });
}

awm_status awm_check(const char* request_json, char** out) {
  return guard([&] {
    need(out, "out");
    json rq = parse_request(request_json);
    auto choice = tail_from(rq);
    double w0 = rq.value("w0", std::max(10.0, 2.0 * choice.tail.threshold));
    auto probes = awm::probe_ladder(w0, rq.value("probes", 4));
    auto rep = awm::check_assumptions(choice.tail, probes);
    json j;
    j["tail"] = choice.tail.describe();
    j["probes"] = rep.probes;
    json conds = json::array();
    for (const auto& c : rep.conditions) {
      json r = json::array();
      for (double v : c.ratios) r.push_back(num(v));
      conds.push_back({{"name", c.name}, {"ratios", r}, {"verdict", awm::verdict_name(c.verdict)}});
    }
    j["conditions"] = conds;
    j["overall"] = awm::verdict_name(rep.overall);
    j["class_membership"] = rep.class_membership;
    j["verdict"] = rep.class_membership == "inside"    ? "inside the w^p log^q w class"
                   : rep.class_membership == "outside" ? "outside the w^p log^q w class"
                                                       : "class membership unknown";
    json moments = json::array();
    for (double mm : rq.value("moments", std::vector<double>{0.0, 2.0})) {
      json row;
      row["m"] = mm;
      json ratios = json::array();
      std::string err;
      for (double w : probes) {
        try {
          ratios.push_back(num(awm::incomplete_moment_ratio(choice.tail, mm, w)));
        } catch (const awm::Error& e) {
          ratios.push_back(nullptr);
          err = e.what();
        }
      }
      row["ratios"] = ratios;
      if (!err.empty()) row["error"] = err;
      moments.push_back(row);
    }
    j["incomplete_moment_ratios"] = moments;
    *out = dup(j.dump(2) + "\n");
  });
}

awm_status awm_lorenz_load_survey(const char* path, awm_lorenz** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new awm_lorenz{awm::load_survey(path)};
  });
}

awm_status awm_lorenz_load_points(const char* path, awm_lorenz** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new awm_lorenz{awm::load_lorenz_points(path)};
  });
}

void awm_lorenz_free(awm_lorenz* lorenz) { delete lorenz; }

awm_status awm_fit(const awm_lorenz* data, const char* config_json, char** result_json, char** errors_csv,
                   char** model_csv) {
  return guard([&] {
    need(data, "data");
    need(result_json, "result_json");
    json rq = parse_request(config_json);
    awm::FitConfig cfg;
    cfg.starts = rq.value("starts", cfg.starts);
    cfg.max_evaluations = rq.value("max_evaluations", cfg.max_evaluations);
    cfg.simplex_tol = rq.value("simplex_tol", cfg.simplex_tol);
    cfg.seed = rq.value("seed", cfg.seed);
    cfg.jobs = rq.value("jobs", cfg.jobs);
    cfg.lambda_scan = rq.value("lambda_scan", cfg.lambda_scan);
    cfg.n_agents = rq.value("n_agents", cfg.n_agents);
    cfg.solver.grid = grid_from(rq, cfg.solver.grid);
    cfg.box.chi_min = rq.value("chi_min", cfg.box.chi_min);
    cfg.box.chi_max = rq.value("chi_max", cfg.box.chi_max);
    cfg.box.zeta_min = rq.value("zeta_min", cfg.box.zeta_min);
    cfg.box.zeta_max = rq.value("zeta_max", cfg.box.zeta_max);
    cfg.box.lambda_min = rq.value("lambda_min", cfg.box.lambda_min);
    cfg.box.lambda_max = rq.value("lambda_max", cfg.box.lambda_max);

    auto r = awm::fit(data->e, cfg);
    std::string res = awm::fit_result_json(r);
    std::string err_csv, mod_csv;
    if (errors_csv || model_csv) {
      auto model = awm::model_lorenz(r.chi, r.zeta, r.lambda, cfg);
      if (errors_csv) {
        auto errs = awm::local_errors(data->e, model);
        err_csv = "F,local_error\n";
        for (std::size_t i = 0; i < errs.size(); ++i)
          err_csv += awm::format_double(data->e.points[i].f) + "," + awm::format_double(errs[i]) + "\n";
      }
      if (model_csv) mod_csv = lorenz_csv(model);
    }
    std::vector<char*> outs;
    try {
      outs.push_back(dup(res));
      if (errors_csv) outs.push_back(dup(err_csv));
      if (model_csv) outs.push_back(dup(mod_csv));
    } catch (...) {
      for (char* p : outs) std::free(p);
      throw;
    }
    std::size_t k = 0;
    *result_json = outs[k++];
    if (errors_csv) *errors_csv = outs[k++];
    if (model_csv) *model_csv = outs[k++];
  });
}

awm_status awm_report(const char* const* result_jsons, const char* const* labels, size_t count, char** table_csv,
                      char** scatter_csv, char** line_csv) {
  return guard([&] {
    need(table_csv, "table_csv");
    need(scatter_csv, "scatter_csv");
    need(line_csv, "line_csv");
    if (count > 0) need(result_jsons, "result_jsons");
    std::vector<awm::CriticalityRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
      need(result_jsons[i], "result json");
      auto r = awm::parse_fit_result(result_jsons[i]);
      awm::CriticalityRow row;
      row.label = labels && labels[i] ? labels[i] : r.source;
      row.chi = r.chi;
      row.zeta = r.zeta;
      row.lambda = r.lambda;
      row.gini = r.gini;
      row.avg_local_error = r.avg_local_error;
      rows.push_back(row);
    }
    char* a = dup(awm::criticality_table_csv(rows));
    char* b = nullptr;
    char* c = nullptr;
    try {
      b = dup(awm::criticality_scatter_csv(rows));
      c = dup(awm::reference_line_csv(rows));
    } catch (...) {
      std::free(a);
      std::free(b);
      throw;
    }
    *table_csv = a;
    *scatter_csv = b;
    *line_csv = c;
  });
}

}  // extern "C"

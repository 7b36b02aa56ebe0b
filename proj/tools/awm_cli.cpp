// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "awm/awm.h"
#include "manifest.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CStr {
  char* p = nullptr;
  CStr() = default;
  CStr(const CStr&) = delete;
  CStr& operator=(const CStr&) = delete;
  ~CStr() { awm_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (p) Free(p);
  }
};
using Policy = Handle<awm_policy, awm_policy_free>;
using Distribution = Handle<awm_distribution, awm_distribution_free>;
using Run = Handle<awm_run, awm_run_free>;
using Lorenz = Handle<awm_lorenz, awm_lorenz_free>;

// Argument-shaped failures become usage errors when `usage` is set.
void check(awm_status s, bool usage = false) {
  if (s == AWM_OK) return;
  std::string msg = std::string(awm_status_name(s)) + ": " + awm_last_error();
  if (usage && (s == AWM_ERR_ARGUMENT || s == AWM_ERR_PARAMETER || s == AWM_ERR_PARSE)) throw UsageError(msg);
  throw RuntimeError(msg);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Context {
  std::vector<std::string> argv;
  std::string out;
};

fs::path output_dir(const Context& ctx, const std::string& command, const json& params) {
  if (!ctx.out.empty()) return ctx.out;
  const char* env = std::getenv("AWM_OUTPUT_ROOT");
  fs::path root = env && *env ? env : "awm-runs";
  return root / (command + "-" + awmcli::sha256_hex(params.dump()).substr(0, 12));
}

json record(const Context& ctx, const std::string& command, const json& params) {
  json r;
  r["command"] = command;
  r["argv"] = ctx.argv;
  r["parameters"] = params;
  if (params.contains("seed")) r["seed"] = params["seed"];
  if (params.contains("nodes")) {
    json g;
    for (const char* k : {"nodes", "x_max", "x_core"})
      if (params.contains(k)) g[k] = params[k];
    r["grid"] = g;
  }
  return r;
}

void policy_input(awmcli::RunDir& dir, const json& rq) {
  std::string s = rq.at("policy").get<std::string>();
  if (s.rfind("file:", 0) == 0) dir.input(s.substr(5));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PolicyFlags {
  std::optional<double> chi;
  std::string spec;

  void add(CLI::App* app) {
    app->add_option("--chi", chi, "flat redistribution rate");
    app->add_option("--policy", spec, "policy spec: flat:0.2, pareto:alpha=1,D=0, file:chi.csv");
  }

  std::string resolve() const {
    if (chi && !spec.empty()) throw UsageError("give either --chi or --policy, not both");
    if (chi) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, *chi);
      return "flat:" + std::string(buf, res.ptr);
    }
    if (spec.empty()) throw UsageError("one of --chi or --policy is required");
    return spec;
  }

  void load(Policy& p, double zeta) const { check(awm_policy_parse(resolve().c_str(), zeta, &p.p), true); }
};

struct MomentFlags {
  double b = 1.0, l = 1.0, mu_bar = 1.0, delta = 0.0, d = 0.0;
  std::optional<double> t_over_n;

  void add(CLI::App* app) {
    app->add_option("--b", b, "B_inf")->capture_default_str();
    app->add_option("--l", l, "L_inf")->capture_default_str();
    app->add_option("--t-over-n", t_over_n, "T/N (default chi_inf * mu_bar)");
    app->add_option("--mu-bar", mu_bar, "shifted mean wealth")->capture_default_str();
    app->add_option("--delta", delta, "debt limit")->capture_default_str();
    app->add_option("--d", d, "subdominant constant D")->capture_default_str();
  }

  void into(json& rq, double zeta, double chi_inf) const {
    rq["b_inf"] = b;
    rq["l_inf"] = l;
    rq["mu_bar"] = mu_bar;
    rq["delta"] = delta;
    rq["d"] = d;
    rq["zeta"] = zeta;
    if (t_over_n)
      rq["t_over_n"] = *t_over_n;
    else if (std::isfinite(chi_inf))
      rq["t_over_n"] = chi_inf * mu_bar;
    else
      throw UsageError("--t-over-n is required when chi_inf is not finite");
  }
};

struct TailFlags {
  std::string name;
  std::optional<double> rate, sigma, alpha, beta, m, a, p, q;

  void add(CLI::App* app) {
    auto* t = app->add_option("--tail", name,
                              "exponential, lognormal, pareto, inverse-gamma, gaussian, "
                              "higher-order-gaussian, power-log, loglog");
    auto* f = app->add_option("--family", name, "alias of --tail");
    t->excludes(f);
    app->add_option("--rate", rate);
    app->add_option("--sigma", sigma);
    app->add_option("--alpha", alpha);
    app->add_option("--beta", beta);
    app->add_option("--m", m, "higher-order Gaussian exponent");
    app->add_option("--a", a, "power-log scale");
    app->add_option("--p", p, "power-log power");
    app->add_option("--q", q, "power-log log power");
  }

  void into(json& rq) const {
    if (name.empty()) throw UsageError("--tail (or --family) is required");
    rq["tail"] = name;
    auto put = [&](const char* k, const std::optional<double>& v) {
      if (v) rq[k] = *v;
    };
    put("rate", rate);
    put("sigma", sigma);
    put("alpha", alpha);
    put("beta", beta);
    put("m", m);
    put("a", a);
    put("p", p);
    put("q", q);
  }
};

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
  std::int64_t n = 1000;
  double zeta = 0.0;
  double lambda = 0.0;
  std::optional<double> wealth;
  PolicyFlags policy;
  std::int64_t sweeps = 1000;
  double dt = 0.05;
  double kappa = 0.5;
  std::uint64_t seed = 1;
  std::int64_t stride = 100;
  bool snapshots = false;
  std::int64_t average_from = -1;
  std::string init = "equal";
  int nodes = 400;
  double x_max = 1e4;
  double x_core = 1e-3;
  bool no_bias_overflow = false;
};

int cmd_simulate(const Context& ctx, const SimulateFlags& f) {
  auto t0 = std::chrono::steady_clock::now();
  json rq;
  rq["n_agents"] = f.n;
  rq["zeta"] = f.zeta;
  rq["lambda"] = f.lambda;
  if (f.wealth) rq["total_wealth"] = *f.wealth;
  rq["policy"] = f.policy.resolve();
  rq["sweeps"] = f.sweeps;
  rq["dt"] = f.dt;
  rq["kappa"] = f.kappa;
  rq["seed"] = f.seed;
  rq["snapshot_stride"] = f.stride;
  rq["keep_snapshots"] = f.snapshots;
  rq["average_from"] = f.average_from;
  rq["init"] = f.init;
  rq["nodes"] = f.nodes;
  rq["x_max"] = f.x_max;
  rq["x_core"] = f.x_core;
  rq["bias_overflow"] = !f.no_bias_overflow;

  Policy pol;
  f.policy.load(pol, f.zeta);
  Run run;
  check(awm_simulate(rq.dump().c_str(), pol.p, &run.p), true);
  awmcli::RunDir dir(output_dir(ctx, "simulate", rq));
  policy_input(dir, rq);
  CStr traj, summary, final_state;
  check(awm_run_trajectory_csv(run.p, &traj.p));
  check(awm_run_summary(run.p, &summary.p));
  check(awm_run_final_state_csv(run.p, &final_state.p));
  dir.write("trajectory.csv", traj.str());
  dir.write("summary.json", summary.str());
  dir.write("final_state.csv", final_state.str());

  if (f.snapshots) {
    std::size_t count = 0;
    check(awm_run_snapshot_count(run.p, &count));
    fs::create_directories(dir.file("snapshots"));
    for (std::size_t k = 0; k < count; ++k) {
      Distribution d;
      std::int64_t sweep = 0;
      check(awm_run_snapshot(run.p, k, &sweep, &d.p));
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/sweep_%09lld", static_cast<long long>(sweep));
      std::string base = name;
      check(awm_distribution_write(d.p, dir.file(base + ".csv").c_str(), dir.file(base + ".json").c_str()));
      dir.adopt(base + ".csv");
      dir.adopt(base + ".json");
    }
  }
  if (f.average_from >= 0) {
    Distribution d;
    if (awm_run_averaged(run.p, &d.p) == AWM_OK) {
      check(awm_distribution_write(d.p, dir.file("averaged.csv").c_str(), dir.file("averaged.json").c_str()));
      dir.adopt("averaged.csv");
      dir.adopt("averaged.json");
    } else {
      std::cerr << "warning: no snapshot fell in the averaging window\n";
    }
  }
  dir.finish(record(ctx, "simulate", rq), seconds_since(t0));
  auto s = json::parse(summary.str());
  std::cout << "output: " << dir.path().string() << "\n";
  if (s.contains("final"))
    std::cout << "final gini " << s["final"]["gini"] << " top1_share " << s["final"]["top1_share"]
              << " top10_share " << s["final"]["top10_share"] << "\n";
  std::cout << "max relative wealth drift " << s["max_wealth_drift"] << ", bias clamps " << s["clamp_count"]
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- steady

struct SteadyFlags {
  double zeta = 0.0;
  double lambda = 0.0;
  std::int64_t n = 10000;
  std::optional<double> wealth;
  PolicyFlags policy;
  int nodes = 2000;
  double x_max = 1e4;
  double x_core = 1e-3;
  double dt = 1.0;
  std::int64_t max_steps = 100000;
  double tol = 1e-9;
  std::string stepping = "implicit";
  std::string flux = "chang-cooper";
  int lorenz_points = 1000;
};

int cmd_steady(const Context& ctx, const SteadyFlags& f) {
  auto t0 = std::chrono::steady_clock::now();
  json rq;
  rq["zeta"] = f.zeta;
  rq["lambda"] = f.lambda;
  rq["n_agents"] = f.n;
  if (f.wealth) rq["total_wealth"] = *f.wealth;
  rq["policy"] = f.policy.resolve();
  rq["nodes"] = f.nodes;
  rq["x_max"] = f.x_max;
  rq["x_core"] = f.x_core;
  rq["dt"] = f.dt;
  rq["max_steps"] = f.max_steps;
  rq["steady_tol"] = f.tol;
  rq["stepping"] = f.stepping;
  rq["flux"] = f.flux;
  rq["lorenz_points"] = f.lorenz_points;

  Policy pol;
  f.policy.load(pol, f.zeta);
  Distribution d;
  CStr report;
  check(awm_steady_state(rq.dump().c_str(), pol.p, &d.p, &report.p), true);
  awmcli::RunDir dir(output_dir(ctx, "steady", rq));
  policy_input(dir, rq);
  check(awm_distribution_write(d.p, dir.file("distribution.csv").c_str(), dir.file("distribution.json").c_str()));
  dir.adopt("distribution.csv");
  dir.adopt("distribution.json");
  dir.write("report.json", report.str());
  CStr lorenz;
  check(awm_distribution_lorenz_csv(d.p, f.lorenz_points, &lorenz.p));
  dir.write("lorenz.csv", lorenz.str());
  dir.finish(record(ctx, "steady", rq), seconds_since(t0));

  auto r = json::parse(report.str());
  std::cout << "output: " << dir.path().string() << "\n";
  std::cout << "converged " << r["converged"] << " after " << r["steps"] << " steps, residual " << r["residual"]
            << "\n";
  std::cout << "condensed_fraction " << r["condensed_fraction"] << " (closed form "
            << r["expected_condensed_fraction"] << "), gini " << r["gini"] << "\n";
  if (!r["converged"].get<bool>())
    std::cerr << "warning: steady state not reached within " << f.max_steps << " steps\n";
  return kExitOk;
}

// ---------------------------------------------------------------- tail

struct TailCmdFlags {
  PolicyFlags policy;
  double zeta = 0.0;
  std::vector<double> w;
  MomentFlags moments;
  std::optional<double> x_ref;
};

int cmd_tail(const Context& ctx, const TailCmdFlags& f) {
  auto t0 = std::chrono::steady_clock::now();
  Policy pol;
  f.policy.load(pol, f.zeta);
  double chi_inf = 0.0;
  check(awm_policy_asymptotic(pol.p, &chi_inf));
  json rq;
  rq["policy"] = f.policy.resolve();
  rq["w"] = f.w;
  f.moments.into(rq, f.zeta, chi_inf);
  if (f.x_ref) rq["x_ref"] = *f.x_ref;

  CStr report;
  check(awm_tail(rq.dump().c_str(), pol.p, &report.p), true);
  awmcli::RunDir dir(output_dir(ctx, "tail", rq));
  policy_input(dir, rq);
  dir.write("tail.json", report.str());
  dir.finish(record(ctx, "tail", rq), seconds_since(t0));

  auto r = json::parse(report.str());
  std::cout << "output: " << dir.path().string() << "\n";
  for (const auto& row : r["tail"])
    std::cout << "f(" << row["w"] << ") = " << row["f"] << "  [integral " << row["integral"] << ", quadratic "
              << row["quadratic"] << ", linear " << row["linear"] << "]\n";
  return kExitOk;
}

// ---------------------------------------------------------------- invert

struct InvertFlags {
  TailFlags tail;
  double zeta = 1.0;
  MomentFlags moments;
  std::optional<double> floor, grid_lo, grid_hi;
  int points = 200;
  bool literal = false;
};

int cmd_invert(const Context& ctx, const InvertFlags& f) {
  auto t0 = std::chrono::steady_clock::now();
  json rq;
  f.tail.into(rq);
  // Inversion does not use chi_inf; T/N defaults to the critical value zeta * mu_bar.
  f.moments.into(rq, f.zeta, f.zeta);
  if (f.floor) rq["floor"] = *f.floor;
  if (f.grid_lo) rq["grid_lo"] = *f.grid_lo;
  if (f.grid_hi) rq["grid_hi"] = *f.grid_hi;
  rq["grid_points"] = f.points;
  rq["literal"] = f.literal;

  CStr report, samples;
  check(awm_invert(rq.dump().c_str(), &report.p, &samples.p), true);
  awmcli::RunDir dir(output_dir(ctx, "invert", rq));
  dir.write("invert.json", report.str());
  dir.write("policy.csv", samples.str());
  dir.finish(record(ctx, "invert", rq), seconds_since(t0));

  auto r = json::parse(report.str());
  std::cout << "output: " << dir.path().string() << "\n";
  std::cout << "tail: " << r["tail"].get<std::string>() << "\n";
  if (r.contains("summary"))
    std::cout << "policy: " << r["summary"].get<std::string>() << " (" << r["closed_form"].get<std::string>()
              << ")\n";
  else if (r.contains("closed_form"))
    std::cout << "policy: " << r["closed_form"].get<std::string>() << "\n";
  if (r.contains("marker")) std::cout << "note: " << r["marker"].get<std::string>() << "\n";
  std::cout << "inverse constant " << r["inverse"]["constant"] << ", limit " << r["inverse"]["limit"] << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- check

struct CheckFlags {
  TailFlags tail;
  std::optional<double> w0;
  int probes = 4;
};

int cmd_check(const Context& ctx, const CheckFlags& f) {
  auto t0 = std::chrono::steady_clock::now();
  json rq;
  f.tail.into(rq);
  if (f.w0) rq["w0"] = *f.w0;
  rq["probes"] = f.probes;
  CStr report;
  check(awm_check(rq.dump().c_str(), &report.p), true);
  awmcli::RunDir dir(output_dir(ctx, "check", rq));
  dir.write("check.json", report.str());
  dir.finish(record(ctx, "check", rq), seconds_since(t0));

  auto r = json::parse(report.str());
  std::cout << "output: " << dir.path().string() << "\n";
  std::cout << "tail: " << r["tail"].get<std::string>() << "\n";
  for (const auto& c : r["conditions"])
    std::cout << "  " << c["name"].get<std::string>() << ": " << c["verdict"].get<std::string>() << "\n";
  std::cout << "verdict: " << r["verdict"].get<std::string>() << " (assumptions "
            << r["overall"].get<std::string>() << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitFlags {
  std::string survey, lorenz;
  int starts = 6;
  int max_evals = 150;
  double tol = 1e-4;
  std::uint64_t seed = 1;
  int jobs = 1;
  int lambda_scan = 41;
  int nodes = 2000;
  double chi_min = 1e-3, chi_max = 4.0, zeta_min = 1e-3, zeta_max = 4.0, lambda_min = 0.0, lambda_max = 2.0;
};

int cmd_fit(const Context& ctx, const FitFlags& f) {
  auto t0 = std::chrono::steady_clock::now();
  if (f.survey.empty() == f.lorenz.empty()) throw UsageError("give exactly one of --survey or --lorenz");
  if (f.jobs < 1) throw UsageError("--jobs must be at least 1");
  const std::string& path = f.survey.empty() ? f.lorenz : f.survey;
  json cfg;
  cfg["starts"] = f.starts;
  cfg["max_evaluations"] = f.max_evals;
  cfg["simplex_tol"] = f.tol;
  cfg["seed"] = f.seed;
  cfg["jobs"] = f.jobs;
  cfg["lambda_scan"] = f.lambda_scan;
  cfg["nodes"] = f.nodes;
  cfg["chi_min"] = f.chi_min;
  cfg["chi_max"] = f.chi_max;
  cfg["zeta_min"] = f.zeta_min;
  cfg["zeta_max"] = f.zeta_max;
  cfg["lambda_min"] = f.lambda_min;
  cfg["lambda_max"] = f.lambda_max;

  Lorenz data;
  check(f.survey.empty() ? awm_lorenz_load_points(path.c_str(), &data.p)
                         : awm_lorenz_load_survey(path.c_str(), &data.p));
  json params = cfg;
  params.erase("jobs");  // results do not depend on it
  params[f.survey.empty() ? "lorenz" : "survey"] = path;
  params["input_sha256"] = awmcli::sha256_file(path);

  CStr result, errors, model;
  check(awm_fit(data.p, cfg.dump().c_str(), &result.p, &errors.p, &model.p), true);
  awmcli::RunDir dir(output_dir(ctx, "fit", params));
  dir.input(path);
  dir.write("fit.json", result.str());
  dir.write("local_error.csv", errors.str());
  dir.write("model_lorenz.csv", model.str());
  params["jobs"] = f.jobs;
  dir.finish(record(ctx, "fit", params), seconds_since(t0));

  auto r = json::parse(result.str());
  std::cout << "output: " << dir.path().string() << "\n";
  std::cout << "chi " << r["chi_opt"] << " zeta " << r["zeta_opt"] << " lambda " << r["lambda_opt"] << " J "
            << r["J"] << " G_fit " << r["G_fit"] << "\n";
  if (r["boundary_hit"].get<bool>()) std::cerr << "warning: optimum on the search-box boundary\n";
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportFlags {
  std::vector<std::string> files;
  std::vector<std::string> labels;
};

std::string default_label(const std::string& file) {
  fs::path p(file);
  if (p.stem() == "fit" && p.has_parent_path() && !p.parent_path().filename().empty())
    return p.parent_path().filename().string();
  return p.stem().string();
}

int cmd_report(const Context& ctx, const ReportFlags& f) {
  auto t0 = std::chrono::steady_clock::now();
  if (!f.labels.empty() && f.labels.size() != f.files.size())
    throw UsageError("--label must be given once per result file");
  std::vector<std::string> texts, labels;
  json params;
  params["files"] = json::array();
  for (std::size_t i = 0; i < f.files.size(); ++i) {
    texts.push_back(slurp(f.files[i]));
    labels.push_back(f.labels.empty() ? default_label(f.files[i]) : f.labels[i]);
    params["files"].push_back({{"path", f.files[i]}, {"sha256", awmcli::sha256_hex(texts.back())}});
  }
  params["labels"] = labels;
  std::vector<const char*> tp, lp;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    tp.push_back(texts[i].c_str());
    lp.push_back(labels[i].c_str());
  }
  CStr table, scatter, line;
  check(awm_report(tp.data(), lp.data(), tp.size(), &table.p, &scatter.p, &line.p));
  awmcli::RunDir dir(output_dir(ctx, "report", params));
  for (const auto& file : f.files) dir.input(file);
  dir.write("table.csv", table.str());
  dir.write("scatter.csv", scatter.str());
  dir.write("reference_line.csv", line.str());
  dir.finish(record(ctx, "report", params), seconds_since(t0));
  std::cout << "output: " << dir.path().string() << "\n" << table.str();
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args);

// ---------------------------------------------------------------- replay

int cmd_replay(const Context& ctx, const std::string& source) {
  json m = awmcli::RunDir::read_manifest(source);
  std::vector<std::string> argv = m.at("argv").get<std::vector<std::string>>();
  std::vector<std::string> next{argv.empty() ? "awm" : argv.front()};
  for (std::size_t i = 1; i < argv.size(); ++i) {
    if (argv[i] == "--out") {
      ++i;
      continue;
    }
    if (argv[i].rfind("--out=", 0) == 0) continue;
    next.push_back(argv[i]);
  }
  fs::path src_dir = fs::is_directory(source) ? fs::path(source) : fs::path(source).parent_path();
  fs::path target = ctx.out.empty() ? fs::path(src_dir.string() + "-replay") : fs::path(ctx.out);
  next.push_back("--out");
  next.push_back(target.string());
  int code = run_cli(next);
  if (code != kExitOk) return code;

  json fresh = awmcli::RunDir::read_manifest(target);
  bool same = m.at("outputs").size() == fresh.at("outputs").size();
  for (std::size_t i = 0; i < m.at("outputs").size(); ++i) {
    const auto& a = m["outputs"][i];
    bool ok = i < fresh["outputs"].size() && fresh["outputs"][i]["file"] == a["file"] &&
              fresh["outputs"][i]["sha256"] == a["sha256"];
    std::cout << (ok ? "match    " : "MISMATCH ") << a["file"].get<std::string>() << "\n";
    same = same && ok;
  }
  std::cout << (same ? "replay reproduced every output\n" : "replay differs\n");
  return same ? kExitOk : kExitRuntime;
}

int run_cli(const std::vector<std::string>& args) {
  Context ctx;
  ctx.argv = args;
  CLI::App app{"Affine wealth model toolkit", "awm"};
  app.set_version_flag("--version", std::string("awm ") + awm_version() + " (schema " + awm_schema_version() + ")");
  app.add_option("--out", ctx.out, "output directory (default $AWM_OUTPUT_ROOT/<command>-<digest>)");
  app.require_subcommand(1);
  app.fallthrough();

  SimulateFlags sim;
  auto* s = app.add_subcommand("simulate", "agent-based Monte Carlo run");
  s->add_option("--n", sim.n, "agents")->capture_default_str();
  s->add_option("--zeta", sim.zeta, "wealth-attained advantage")->required();
  s->add_option("--lambda", sim.lambda, "debt ratio")->capture_default_str();
  s->add_option("--wealth", sim.wealth, "total wealth W (default N)");
  sim.policy.add(s);
  s->add_option("--sweeps", sim.sweeps)->capture_default_str();
  s->add_option("--dt", sim.dt)->capture_default_str();
  s->add_option("--kappa", sim.kappa, "stake cap as a fraction of the poorer shifted wealth")->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--stride", sim.stride, "sweeps between summaries")->capture_default_str();
  s->add_flag("--snapshots", sim.snapshots, "write histogram snapshots");
  s->add_option("--average-from", sim.average_from, "average histograms from this sweep on");
  s->add_option("--init", sim.init, "equal or exponential")
      ->check(CLI::IsMember({"equal", "exponential"}))
      ->capture_default_str();
  s->add_option("--nodes", sim.nodes, "histogram grid nodes")->capture_default_str();
  s->add_option("--x-max", sim.x_max)->capture_default_str();
  s->add_option("--x-core", sim.x_core)->capture_default_str();
  s->add_flag("--no-bias-overflow", sim.no_bias_overflow);

  SteadyFlags st;
  auto* sd = app.add_subcommand("steady", "Fokker-Planck steady state");
  sd->add_option("--zeta", st.zeta)->required();
  sd->add_option("--lambda", st.lambda)->capture_default_str();
  sd->add_option("--n", st.n)->capture_default_str();
  sd->add_option("--wealth", st.wealth, "total wealth W (default N)");
  st.policy.add(sd);
  sd->add_option("--nodes", st.nodes)->capture_default_str();
  sd->add_option("--x-max", st.x_max)->capture_default_str();
  sd->add_option("--x-core", st.x_core)->capture_default_str();
  sd->add_option("--dt", st.dt)->capture_default_str();
  sd->add_option("--max-steps", st.max_steps)->capture_default_str();
  sd->add_option("--tol", st.tol)->capture_default_str();
  sd->add_option("--stepping", st.stepping)->check(CLI::IsMember({"implicit", "explicit"}))->capture_default_str();
  sd->add_option("--flux", st.flux)->check(CLI::IsMember({"chang-cooper", "upwind"}))->capture_default_str();
  sd->add_option("--lorenz-points", st.lorenz_points)->capture_default_str();

  TailCmdFlags tl;
  auto* t = app.add_subcommand("tail", "large-wealth exponent f(w) of a policy");
  tl.policy.add(t);
  t->add_option("--zeta", tl.zeta)->capture_default_str();
  t->add_option("--w", tl.w, "wealth (repeatable)")->required();
  tl.moments.add(t);
  t->add_option("--x-ref", tl.x_ref, "lower limit of the redistribution integral");

  InvertFlags iv;
  auto* inv = app.add_subcommand("invert", "redistribution policy producing a given tail");
  iv.tail.add(inv);
  inv->add_option("--zeta", iv.zeta)->capture_default_str();
  iv.moments.add(inv);
  inv->add_option("--floor", iv.floor, "wealth below which closed forms are held constant");
  inv->add_option("--grid-lo", iv.grid_lo);
  inv->add_option("--grid-hi", iv.grid_hi);
  inv->add_option("--points", iv.points)->capture_default_str();
  inv->add_flag("--literal", iv.literal, "use the printed inverse-gamma entry");

  CheckFlags ck;
  auto* c = app.add_subcommand("check", "tail regularity conditions");
  ck.tail.add(c);
  c->add_option("--w0", ck.w0, "first probe wealth");
  c->add_option("--probes", ck.probes)->capture_default_str();

  FitFlags ft;
  auto* fi = app.add_subcommand("fit", "fit (chi, zeta, lambda) to a Lorenz curve");
  fi->add_option("--survey", ft.survey, "CSV wealth,weight");
  fi->add_option("--lorenz", ft.lorenz, "CSV F,L");
  fi->add_option("--starts", ft.starts)->capture_default_str();
  fi->add_option("--max-evals", ft.max_evals, "objective evaluations per start")->capture_default_str();
  fi->add_option("--tol", ft.tol, "simplex size tolerance")->capture_default_str();
  fi->add_option("--seed", ft.seed)->capture_default_str();
  fi->add_option("--jobs", ft.jobs)->capture_default_str();
  fi->add_option("--lambda-scan", ft.lambda_scan)->capture_default_str();
  fi->add_option("--nodes", ft.nodes)->capture_default_str();
  fi->add_option("--chi-min", ft.chi_min)->capture_default_str();
  fi->add_option("--chi-max", ft.chi_max)->capture_default_str();
  fi->add_option("--zeta-min", ft.zeta_min)->capture_default_str();
  fi->add_option("--zeta-max", ft.zeta_max)->capture_default_str();
  fi->add_option("--lambda-min", ft.lambda_min)->capture_default_str();
  fi->add_option("--lambda-max", ft.lambda_max)->capture_default_str();

  ReportFlags rp;
  auto* r = app.add_subcommand("report", "criticality table and scatter from fit results");
  r->add_option("files", rp.files, "fit JSON files")->required();
  r->add_option("--label", rp.labels, "row label (once per file)");

  std::string replay_source;
  auto* rpl = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  rpl->add_option("manifest", replay_source, "manifest.json or its directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(ctx, sim);
    if (sd->parsed()) return cmd_steady(ctx, st);
    if (t->parsed()) return cmd_tail(ctx, tl);
    if (inv->parsed()) return cmd_invert(ctx, iv);
    if (c->parsed()) return cmd_check(ctx, ck);
    if (fi->parsed()) return cmd_fit(ctx, ft);
    if (r->parsed()) return cmd_report(ctx, rp);
    if (rpl->parsed()) return cmd_replay(ctx, replay_source);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args);
}

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "awm/model.hpp"

namespace awm {

enum class TailKind {
  exponential,
  lognormal,
  pareto,
  inverse_gamma,
  gaussian,
  higher_order_gaussian,
  power_log,
  custom,
};

const char* tail_kind_name(TailKind k) noexcept;

/// Large-wealth exponent f with P ~ C exp(-f(w)) for w > threshold.
struct TailFunction {
  TailKind kind = TailKind::custom;
  std::string label;
  // family parameters (only the ones relevant to `kind` are used)
  double rate = 1.0;
  double sigma = 1.0;
  double alpha = 1.0;
  double beta = 0.0;
  double m = 2.0;
  double a = 1.0;
  double p = 1.0;
  double q = 0.0;
  double threshold = 0.0;
  std::function<double(double)> f;
  std::function<double(double)> fp;
  std::function<double(double)> fpp;

  static TailFunction exponential(double rate);
  static TailFunction lognormal(double sigma);
  static TailFunction pareto(double alpha);
  static TailFunction inverse_gamma(double alpha, double beta);
  static TailFunction gaussian(double sigma);
  static TailFunction higher_order_gaussian(double m, double sigma);
  /// a * w^p * log(w)^q
  static TailFunction power_log(double a, double p, double q);
  static TailFunction custom(std::function<double(double)> f, std::function<double(double)> fp,
                             std::function<double(double)> fpp, double threshold, std::string label);

  double value(double w) const;
  double d1(double w) const;
  double d2(double w) const;
  std::string describe() const;
};

struct MomentInputs {
  double b_inf = 1.0;
  double l_inf = 1.0;
  double t_over_n = 0.0;
  double mu_bar = 1.0;
  double delta = 0.0;
  double zeta = 0.0;
  double d = 0.0;

  void validate() const;
};

struct ForwardTerms {
  double integral = 0.0;
  double quadratic = 0.0;
  double linear = 0.0;
  double total = 0.0;
};

/// Lower limit of the redistribution integral: 0 for flat policies (closed
/// form), `x_ref` (default mu_bar) otherwise.
struct ForwardOptions {
  double x_ref = std::numeric_limits<double>::quiet_NaN();
  double rel_tol = 1e-10;
};

ForwardTerms forward_tail_terms(const RedistributionPolicy& policy, const MomentInputs& moments, double w,
                                const ForwardOptions& options = {});
double forward_tail(const RedistributionPolicy& policy, const MomentInputs& moments, double w,
                    const ForwardOptions& options = {});

/// chi(y) = zeta(2 L - 1) + iota(y), iota(y) = [B f'(y - Delta) - (2 zeta B - (T/N) mu_bar) / mu_bar] / y.
struct InvertedPolicy {
  TailFunction tail;
  MomentInputs moments;
  double constant = 0.0;

  double iota(double y) const;
  double operator()(double y) const;
  RedistributionPolicy policy() const;
  RedistributionPolicy sampled(const std::vector<double>& grid) const;
};

InvertedPolicy invert_redistribution(const TailFunction& tail, const MomentInputs& moments);

struct CatalogueEntry {
  RedistributionPolicy policy;
  bool critical = true;
  std::string marker;
};

struct CatalogueRequest {
  Family family = Family::exponential;
  double alpha = 1.0;
  double beta = 1.0;
  double sigma = 1.0;
  double m = 2.0;
  double floor = 1.0;
  bool literal_table_entry = false;
};

CatalogueEntry catalogue(const CatalogueRequest& request, const MomentInputs& moments);

/// Largest root of g'(w) = |epsilon| w found by a descending geometric scan
/// followed by bisection.
double crossover_wealth(const std::function<double(double)>& g_prime, double epsilon, double lo = 1e-6,
                        double hi = 1e12);

/// N A(w) < 1 on the given distribution.
bool no_agents_beyond(const WealthDistribution& dist, double w);

enum class Verdict { satisfied, violated, inconclusive };
const char* verdict_name(Verdict v) noexcept;

struct ConditionReport {
  std::string name;
  std::vector<double> ratios;
  Verdict verdict = Verdict::inconclusive;
};

struct AssumptionReport {
  std::vector<double> probes;
  std::vector<ConditionReport> conditions;
  Verdict overall = Verdict::inconclusive;
  // "inside", "outside" or "unknown" with respect to the w^p log^q w class
  std::string class_membership;
};

/// Geometric ladder w, 2w, 4w, 8w.
std::vector<double> probe_ladder(double w, int count = 4);
AssumptionReport check_assumptions(const TailFunction& tail, const std::vector<double>& probes);

/// [int_w^inf x^m e^{-f(x)} dx] / [(w^m / f'(w)) e^{-f(w)}]
double incomplete_moment_ratio(const TailFunction& tail, double m, double w, double rel_tol = 1e-10);

struct RatioCheck {
  std::string name;
  double limit = 0.0;
  double max_deviation = 0.0;
  std::vector<double> ratios;
};

struct ReductionReport {
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::vector<double> x;
  std::vector<RatioCheck> checks;
};

/// Evaluated in the shifted frame on the top resolved decade, where resolved
/// means P >= floor * max(P).
ReductionReport validate_reduction(const WealthDistribution& dist, const RedistributionPolicy& policy,
                                   double floor = 1e-200);

struct TailFit {
  double quadratic = 0.0;
  double linear = 0.0;
  double constant = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t points = 0;
};

/// Least squares of -log P = a x^2 + b x + c over the top resolved decade
/// in shifted wealth.
TailFit fit_log_tail(const WealthDistribution& dist, double floor = 1e-200);

}  // namespace awm

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace awm {

/// Society parameters. Wealth is measured in units of W; the debt limit is
/// delta() = lambda * mu() so that the shifted mean is mu_bar() = (1+lambda) mu.
struct ModelParams {
  double zeta = 0.0;
  double lambda = 0.0;
  std::int64_t n_agents = 2;
  double total_wealth = 1.0;

  static ModelParams make(double zeta, double lambda, std::int64_t n, double w);

  double mu() const { return total_wealth / static_cast<double>(n_agents); }
  double delta() const { return lambda * mu(); }
  double mu_bar() const { return mu() + delta(); }
  void validate() const;
};

enum class Family { exponential, lognormal, pareto, inverse_gamma, gaussian, higher_order_gaussian };

const char* family_name(Family f) noexcept;

struct FlatPolicy {
  double chi = 0.0;
};

// Closed-form catalogue entry. Wealth arguments below `floor` are evaluated at
// `floor` so the closed forms stay finite on the whole support.
struct CataloguePolicy {
  Family family = Family::exponential;
  double zeta = 0.0;
  double b_inf = 1.0;
  double d = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  double sigma = 1.0;
  double m = 2.0;
  double floor = 1.0;
  bool literal_table_entry = false;
};

struct PiecewisePolicy {
  std::vector<double> knots;
  std::vector<double> values;
};

struct SampledPolicy {
  std::vector<double> grid;
  std::vector<double> rates;
};

struct CustomPolicy {
  std::function<double(double)> fn;
  double limit = 0.0;
  std::string label;
};

class RedistributionPolicy {
 public:
  using Variant = std::variant<FlatPolicy, CataloguePolicy, PiecewisePolicy, SampledPolicy, CustomPolicy>;

  RedistributionPolicy() : v_(FlatPolicy{}) {}
  explicit RedistributionPolicy(Variant v);

  static RedistributionPolicy flat(double chi);
  static RedistributionPolicy catalogue(const CataloguePolicy& c);
  static RedistributionPolicy piecewise(std::vector<double> knots, std::vector<double> values);
  static RedistributionPolicy sampled(std::vector<double> grid, std::vector<double> rates);
  static RedistributionPolicy custom(std::function<double(double)> fn, double limit, std::string label);

  /// chi(w) without a frame check.
  double operator()(double w) const;
  /// chi(w) for a society with debt limit delta; w < -delta is a domain error.
  double eval(double w, double delta) const;
  /// Large-wealth limit chi_inf (may be +inf).
  double asymptotic() const;
  bool is_flat() const { return std::holds_alternative<FlatPolicy>(v_); }
  std::string describe() const;
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

double eval_policy(const RedistributionPolicy& p, double w, double delta);

/// Density on a strictly increasing AWM wealth grid with grid[0] = -Delta,
/// plus a condensed share c of total wealth carried by no agents.
struct WealthDistribution {
  std::vector<double> grid;
  std::vector<double> density;
  double condensed_fraction = 0.0;
  double n_agents = 0.0;
  double total_wealth = 0.0;
  double lambda = 0.0;

  double delta() const { return grid.empty() ? 0.0 : -grid.front(); }
  std::size_t size() const { return grid.size(); }
  /// Throws when any invariant fails; tol is relative.
  void validate(double tol = 1e-9) const;
};

/// Trapezoid weights h_i with sum_i g_i h_i equal to the trapezoid rule.
std::vector<double> trapezoid_weights(const std::vector<double>& x);

struct Potentials {
  std::vector<double> a;
  std::vector<double> l;
  std::vector<double> b;
  double t = 0.0;
  double l_inf = 0.0;
  double b_inf = 0.0;
};

// awm: integrals of w from -Delta normalized by W. shifted: integrals of
// x = w + Delta normalized by the shifted total W + N Delta.
enum class Frame { awm, shifted };

/// T is the same in both frames and includes the condensate's payment.
Potentials compute_potentials(const WealthDistribution& dist, const RedistributionPolicy& policy,
                              Frame frame = Frame::awm);

/// Potentials of a discrete ensemble sampled at the query points. A counts
/// agents with wealth >= w; L and B accumulate agents with wealth <= w.
Potentials ensemble_potentials(const std::vector<double>& wealths, double delta, const std::vector<double>& at,
                               const RedistributionPolicy& policy);

struct LorenzPoint {
  double f = 0.0;
  double l = 0.0;
};
using LorenzCurve = std::vector<LorenzPoint>;

LorenzCurve lorenz_curve(const WealthDistribution& dist);
/// One point per agent, starting at (0, 0).
LorenzCurve lorenz_curve(std::vector<double> wealths);

double lorenz_area(const LorenzCurve& curve);
double gini(const LorenzCurve& curve);
double gini(const WealthDistribution& dist);
double gini(const std::vector<double>& wealths);

double l_infinity_eysm(double chi_inf, double zeta);
double oligarch_fraction_awm(double chi_inf, double zeta, double lambda);

}  // namespace awm

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "awm/fitting.hpp"
#include "awm/kinetics.hpp"
#include "awm/model.hpp"
#include "prop.hpp"

namespace props {

constexpr int kCases = 1000;

struct Property {
  std::string name;
  prop::Outcome (*run)();
};

inline std::string fmt(const char* what, double got, double want) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": got " << got << ", want " << want;
  return os.str();
}

inline bool close(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

struct SimCase {
  awm::ModelParams params;
  double chi = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  int sweeps = 0;
};

inline SimCase random_sim(awm::Rng& r) {
  SimCase c;
  auto n = static_cast<std::int64_t>(2 + r.below(63));
  c.params = awm::ModelParams::make(prop::uniform(r, 0.0, 1.0), prop::uniform(r, 0.0, 0.9), n,
                                    prop::uniform(r, 0.5, 20.0) * static_cast<double>(n));
  c.chi = prop::uniform(r, 0.0, 1.0);
  c.dt = prop::uniform(r, 0.005, 0.2);
  c.seed = r.next();
  c.sweeps = static_cast<int>(1 + r.below(20));
  return c;
}

/// Sweeps keep total wealth and the debt floor.
inline prop::Outcome conservation() {
  return prop::forall(kCases, 101, random_sim, [](const SimCase& c) -> std::string {
    awm::Rng rng(c.seed);
    auto e = awm::exponential_ensemble(c.params, rng);
    awm::SimConfig cfg;
    cfg.dt = c.dt;
    auto pol = awm::RedistributionPolicy::flat(c.chi);
    for (int k = 0; k < c.sweeps; ++k) {
      auto d = awm::sweep(e, c.params, pol, cfg, rng);
      if (d.wealth_drift > 1e-12) return fmt("wealth drift", d.wealth_drift, 0.0);
    }
    double total = std::accumulate(e.wealths.begin(), e.wealths.end(), 0.0);
    if (!close(total, c.params.total_wealth, 1e-12)) return fmt("total wealth", total, c.params.total_wealth);
    for (double w : e.wealths)
      if (w < -c.params.delta()) return fmt("below the debt floor", w, -c.params.delta());
    return "";
  });
}

/// Equal seeds give bitwise equal ensembles.
inline prop::Outcome determinism() {
  return prop::forall(kCases, 202, random_sim, [](const SimCase& c) -> std::string {
    awm::SimConfig cfg;
    cfg.dt = c.dt;
    auto pol = awm::RedistributionPolicy::flat(c.chi);
    auto once = [&] {
      awm::Rng rng(c.seed);
      auto e = awm::exponential_ensemble(c.params, rng);
      for (int k = 0; k < c.sweeps; ++k) awm::sweep(e, c.params, pol, cfg, rng);
      return e.wealths;
    };
    return once() == once() ? "" : "ensembles differ for one seed";
  });
}

inline std::vector<double> random_wealths(awm::Rng& r, std::size_t max_n) {
  std::size_t n = 2 + r.below(max_n - 1);
  std::vector<double> w(n);
  double spread = prop::uniform(r, 0.1, 5.0);
  for (auto& v : w) v = std::exp(spread * prop::uniform(r, -3.0, 3.0));
  if (r.uniform() < 0.2) w[r.below(n)] = 0.0;
  return w;
}

/// Gini lies in [0, 1) and ignores scale and order.
inline prop::Outcome gini_invariants() {
  auto gen = [](awm::Rng& r) {
    auto w = random_wealths(r, 300);
    double k = std::exp(prop::uniform(r, -20.0, 20.0));
    auto p = w;
    for (std::size_t i = p.size() - 1; i > 0; --i) std::swap(p[i], p[r.below(i + 1)]);
    return std::tuple{w, k, p};
  };
  return prop::forall(kCases, 303, gen, [](const auto& in) -> std::string {
    const auto& [w, k, perm] = in;
    double g = awm::gini(w);
    if (!(g >= 0.0 && g < 1.0)) return fmt("gini outside [0, 1)", g, 0.5);
    auto s = w;
    for (auto& v : s) v *= k;
    double gs = awm::gini(s);
    if (std::abs(gs - g) > 1e-12) return fmt("scaled gini", gs, g);
    double gp = awm::gini(perm);
    if (std::abs(gp - g) > 1e-12) return fmt("permuted gini", gp, g);
    return "";
  });
}

/// Discrepancy is a metric on Lorenz curves.
inline prop::Outcome discrepancy_metric() {
  auto gen = [](awm::Rng& r) {
    return std::array<awm::LorenzCurve, 3>{awm::lorenz_curve(random_wealths(r, 60)),
                                           awm::lorenz_curve(random_wealths(r, 60)),
                                           awm::lorenz_curve(random_wealths(r, 60))};
  };
  return prop::forall(kCases, 404, gen, [](const auto& c) -> std::string {
    double ab = awm::discrepancy(c[0], c[1]), ba = awm::discrepancy(c[1], c[0]);
    double bc = awm::discrepancy(c[1], c[2]), ac = awm::discrepancy(c[0], c[2]);
    if (awm::discrepancy(c[0], c[0]) != 0.0) return fmt("J(a, a)", awm::discrepancy(c[0], c[0]), 0.0);
    if (ab < 0.0) return fmt("J(a, b) negative", ab, 0.0);
    if (std::abs(ab - ba) > 1e-15) return fmt("J(a, b) vs J(b, a)", ab, ba);
    if (ac > ab + bc + 1e-15) return fmt("triangle J(a, c)", ac, ab + bc);
    return "";
  });
}

/// Ensemble potentials against a direct double loop.
inline prop::Outcome potentials_brute_force() {
  struct In {
    std::vector<double> w;
    std::vector<double> at;
    double delta;
    double chi;
  };
  auto gen = [](awm::Rng& r) {
    In in;
    in.delta = r.uniform() < 0.5 ? 0.0 : prop::uniform(r, 0.0, 3.0);
    in.w = random_wealths(r, 1000);
    for (auto& v : in.w) v -= in.delta * r.uniform();
    in.chi = prop::uniform(r, 0.0, 1.0);
    for (int k = 0; k < 16; ++k) in.at.push_back(in.w[r.below(in.w.size())] * (r.uniform() < 0.5 ? 1.0 : 1.1));
    in.at.push_back(-in.delta);
    return in;
  };
  return prop::forall(kCases, 505, gen, [](const In& in) -> std::string {
    auto p = awm::ensemble_potentials(in.w, in.delta, in.at, awm::RedistributionPolicy::flat(in.chi));
    const double n = static_cast<double>(in.w.size());
    double total = 0.0, t = 0.0, b_inf = 0.0;
    for (double v : in.w) {
      total += v;
      t += in.chi * (v + in.delta);
      b_inf += 0.5 * v * v / n;
    }
    if (!close(p.t, t, 1e-12)) return fmt("T", p.t, t);
    if (!close(p.b_inf, b_inf, 1e-12)) return fmt("B_inf", p.b_inf, b_inf);
    for (std::size_t q = 0; q < in.at.size(); ++q) {
      double a = 0.0, l = 0.0, b = 0.0;
      for (double v : in.w) {
        if (v >= in.at[q]) a += 1.0;
        if (v <= in.at[q]) {
          l += v;
          b += 0.5 * v * v;
        }
      }
      if (p.a[q] != a / n) return fmt("A", p.a[q], a / n);
      if (!close(p.l[q], l / total, 1e-12)) return fmt("L", p.l[q], l / total);
      if (!close(p.b[q], b / n, 1e-12)) return fmt("B", p.b[q], b / n);
    }
    return "";
  });
}

inline std::vector<Property> all() {
  return {{"conservation", conservation},
          {"determinism", determinism},
          {"gini invariants", gini_invariants},
          {"discrepancy metric", discrepancy_metric},
          {"potentials vs brute force", potentials_brute_force}};
}

}  // namespace props

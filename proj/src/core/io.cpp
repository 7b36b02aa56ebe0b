// SPDX-License-Identifier: Apache-2.0
#include "awm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "awm/error.hpp"

namespace awm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail(Errc::argument, "policy spec: " + what + " is not a number: '" + text + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected, const std::string& origin) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      t.header = cells;
      if (t.header != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
        fail(Errc::parse, origin + ":" + std::to_string(lineno) + ": expected header '" + want + "'");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != expected.size())
      fail(Errc::parse, origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(expected.size()) +
                            " fields, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size() || !std::isfinite(v))
        fail(Errc::parse, origin + ":" + std::to_string(lineno) + ": non-finite or malformed value '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header) fail(Errc::parse, origin + ": missing header");
  return t;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(Errc::io, "write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected) {
  return parse_csv(read_text(path), expected, path);
}

void write_distribution(const WealthDistribution& dist, const std::string& csv_path, const std::string& json_path) {
  std::string s = "w,density\n";
  for (std::size_t i = 0; i < dist.size(); ++i)
    s += format_double(dist.grid[i]) + "," + format_double(dist.density[i]) + "\n";
  write_text(csv_path, s);
  nlohmann::ordered_json j;
  j["n_agents"] = dist.n_agents;
  j["total_wealth"] = dist.total_wealth;
  j["condensed_fraction"] = dist.condensed_fraction;
  j["lambda"] = dist.lambda;
  write_text(json_path, j.dump(2) + "\n");
}

WealthDistribution read_distribution(const std::string& csv_path, const std::string& json_path) {
  auto t = read_csv(csv_path, {"w", "density"});
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(json_path));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, json_path + ": " + e.what());
  }
  WealthDistribution d;
  try {
    d.n_agents = j.at("n_agents").get<double>();
    d.total_wealth = j.at("total_wealth").get<double>();
    d.condensed_fraction = j.at("condensed_fraction").get<double>();
    d.lambda = j.at("lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, json_path + ": " + e.what());
  }
  for (const auto& r : t.rows) {
    d.grid.push_back(r[0]);
    d.density.push_back(r[1]);
  }
  d.validate();
  return d;
}

void write_lorenz(const LorenzCurve& curve, const std::string& path) {
  std::string s = "F,L\n";
  for (const auto& p : curve) s += format_double(p.f) + "," + format_double(p.l) + "\n";
  write_text(path, s);
}

LorenzCurve read_lorenz(const std::string& path) {
  auto t = read_csv(path, {"F", "L"});
  LorenzCurve c;
  for (const auto& r : t.rows) c.push_back({r[0], r[1]});
  return c;
}

void write_policy_samples(const std::vector<double>& w, const std::vector<double>& chi, const std::string& path) {
  require(w.size() == chi.size(), Errc::argument, "policy samples: size mismatch");
  std::string s = "w,chi\n";
  for (std::size_t i = 0; i < w.size(); ++i) s += format_double(w[i]) + "," + format_double(chi[i]) + "\n";
  write_text(path, s);
}

RedistributionPolicy read_policy_samples(const std::string& path) {
  auto t = read_csv(path, {"w", "chi"});
  std::vector<double> g, r;
  for (const auto& row : t.rows) {
    g.push_back(row[0]);
    r.push_back(row[1]);
  }
  return RedistributionPolicy::sampled(std::move(g), std::move(r));
}

RedistributionPolicy parse_policy_spec(const std::string& spec, double default_zeta) {
  std::size_t colon = spec.find(':');
  require(colon != std::string::npos, Errc::argument, "policy spec '" + spec + "': expected kind:arguments");
  std::string kind = trim(spec.substr(0, colon));
  std::string rest = spec.substr(colon + 1);
  if (kind == "flat") return RedistributionPolicy::flat(number(rest, "flat rate"));
  if (kind == "file") {
    require(!trim(rest).empty(), Errc::argument, "policy spec: file path is empty");
    return read_policy_samples(trim(rest));
  }

  std::vector<std::pair<std::string, double>> kv;
  for (const auto& item : split(rest)) {
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    require(eq != std::string::npos, Errc::argument, "policy spec: expected key=value, got '" + item + "'");
    kv.emplace_back(trim(item.substr(0, eq)), number(item.substr(eq + 1), trim(item.substr(0, eq))));
  }

  if (kind == "piecewise") {
    std::vector<double> knots, values;
    for (const auto& [k, v] : kv) {
      knots.push_back(number(k, "piecewise knot"));
      values.push_back(v);
    }
    return RedistributionPolicy::piecewise(std::move(knots), std::move(values));
  }

  CataloguePolicy c;
  if (kind == "exponential") c.family = Family::exponential;
  else if (kind == "lognormal") c.family = Family::lognormal;
  else if (kind == "pareto") c.family = Family::pareto;
  else if (kind == "inverse-gamma") c.family = Family::inverse_gamma;
  else if (kind == "gaussian") c.family = Family::gaussian;
  else if (kind == "higher-order-gaussian" || kind == "hog") c.family = Family::higher_order_gaussian;
  else fail(Errc::argument, "policy spec: unknown kind '" + kind + "'");
  c.zeta = default_zeta;
  for (const auto& [k, v] : kv) {
    if (k == "zeta") c.zeta = v;
    else if (k == "B") c.b_inf = v;
    else if (k == "D") c.d = v;
    else if (k == "alpha") c.alpha = v;
    else if (k == "beta") c.beta = v;
    else if (k == "sigma") c.sigma = v;
    else if (k == "m") c.m = v;
    else if (k == "floor") c.floor = v;
    else if (k == "literal") c.literal_table_entry = v != 0.0;
    else fail(Errc::argument, "policy spec: unknown key '" + k + "' for " + kind);
  }
  return RedistributionPolicy::catalogue(c);
}

}  // namespace awm

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "awm/model.hpp"

namespace awm {

/// Shortest text that parses back to exactly the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
};

/// Reads a numeric CSV whose header must match `expected` exactly.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected);
CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected, const std::string& origin);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

void write_distribution(const WealthDistribution& dist, const std::string& csv_path, const std::string& json_path);
WealthDistribution read_distribution(const std::string& csv_path, const std::string& json_path);

void write_lorenz(const LorenzCurve& curve, const std::string& path);
LorenzCurve read_lorenz(const std::string& path);

void write_policy_samples(const std::vector<double>& w, const std::vector<double>& chi, const std::string& path);
RedistributionPolicy read_policy_samples(const std::string& path);

/// `flat:0.2`, `file:chi.csv`, `piecewise:0=0.1,10=0.2` or a catalogue family
/// with keys zeta, B, D, alpha, beta, sigma, m, floor, literal, e.g.
/// `pareto:alpha=1,D=0`. A missing zeta falls back to `default_zeta`.
RedistributionPolicy parse_policy_spec(const std::string& spec, double default_zeta);

}  // namespace awm

// Copyright 2026 The diqkd-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <sstream>

#include "diqkd/errors.hpp"
#include "diqkd/io.hpp"
#include "diqkd/mathcore.hpp"
#include "diqkd/pipeline.hpp"

namespace diqkd {
namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t index(const std::string& path, const std::string& col) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == col) return i;
    }
    throw ConfigError(path + ": missing column '" + col + "'");
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

// Comment lines start with '#'; the first other line is the header.
Csv read_csv(const std::string& path) {
  if (path.empty()) throw ConfigError("data file path not configured");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  Csv csv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (csv.header.empty()) {
      csv.header = std::move(cells);
    } else {
      if (cells.size() != csv.header.size()) throw ConfigError(path + ": ragged row '" + line + "'");
      csv.rows.push_back(std::move(cells));
    }
  }
  if (csv.header.empty()) throw ConfigError(path + ": no header row");
  return csv;
}

double num(const std::string& path, const std::string& v) {
  try {
    return io::parse_double(v);
  } catch (const std::exception&) {
    throw ConfigError(path + ": bad number '" + v + "'");
  }
}

}  // namespace

std::vector<DistanceRow> load_distance_rows(const std::string& path) {
  const Csv csv = read_csv(path);
  const auto iL = csv.index(path, "length_km");
  const auto iT = csv.index(path, "fiber_transmission");
  const auto iA = csv.index(path, "excitation");
  const auto iZ = csv.index(path, "v_z");
  const auto iX = csv.index(path, "v_x");
  const auto iF = csv.index(path, "fidelity_target");
  const auto iR = csv.index(path, "reconstructed");
  std::vector<DistanceRow> out;
  for (const auto& r : csv.rows) {
    DistanceRow d;
    d.length_km = num(path, r[iL]);
    d.fiber_transmission = num(path, r[iT]);
    d.excitation = num(path, r[iA]);
    d.v_z = num(path, r[iZ]);
    d.v_x = num(path, r[iX]);
    d.fidelity_target = num(path, r[iF]);
    d.reconstructed = num(path, r[iR]) != 0.0;
    if (!(d.length_km >= 0.0 && d.fiber_transmission >= 0.0 && d.fiber_transmission <= 1.0 &&
          d.excitation >= 0.0 && d.excitation <= 1.0)) {
      throw ConfigError(path + ": calibration row out of range");
    }
    out.push_back(d);
  }
  return out;
}

std::vector<PvalueRow> load_pvalue_rows(const std::string& path) {
  const Csv csv = read_csv(path);
  const auto iL = csv.index(path, "length_km");
  const auto iN = csv.index(path, "N");
  const auto iS = csv.index(path, "S_obs");
  const auto iP = csv.index(path, "reported_log10_p");
  const auto iSrc = csv.index(path, "s_source");
  std::vector<PvalueRow> out;
  for (const auto& r : csv.rows) {
    PvalueRow p;
    p.length_km = num(path, r[iL]);
    const double n = num(path, r[iN]);
    if (n < 1.0 || n != std::floor(n)) throw ConfigError(path + ": N must be a positive integer");
    p.N = static_cast<std::int64_t>(n);
    p.S_obs = num(path, r[iS]);
    p.reported_log10_p = num(path, r[iP]);
    p.s_source = r[iSrc];
    out.push_back(p);
  }
  return out;
}

std::vector<BudgetColumn> load_error_budget(const std::string& path) {
  const Csv csv = read_csv(path);
  if (csv.header.size() < 2 || csv.header[0] != "source") throw ConfigError(path + ": first column must be 'source'");
  std::vector<BudgetColumn> cols(csv.header.size() - 1);
  for (std::size_t j = 1; j < csv.header.size(); ++j) cols[j - 1].length_km = num(path, csv.header[j]);
  bool have_total = false;
  bool have_fid = false;
  for (const auto& r : csv.rows) {
    for (std::size_t j = 1; j < r.size(); ++j) {
      const double v = num(path, r[j]);
      if (r[0] == "total") {
        cols[j - 1].stated_total = v;
      } else if (r[0] == "measured_fidelity") {
        cols[j - 1].measured_fidelity = v;
      } else {
        cols[j - 1].sources.emplace_back(r[0], v);
      }
    }
    have_total |= r[0] == "total";
    have_fid |= r[0] == "measured_fidelity";
  }
  if (!have_total || !have_fid) throw ConfigError(path + ": needs 'total' and 'measured_fidelity' rows");
  return cols;
}

Table pvalue_table(const std::vector<PvalueRow>& rows) {
  Table t;
  t.name = "pvalues";
  t.columns = {"length_km", "N", "S_obs", "k", "log10_p", "reported_log10_p", "s_source"};
  for (const auto& r : rows) {
    const double omega = math::chsh_to_winprob(r.S_obs);
    const auto k = static_cast<std::int64_t>(std::llround(static_cast<double>(r.N) * omega));
    if (k < 0 || k > r.N) throw ConfigError("p-value row: S_obs gives a win count outside [0, N]");
    const double lp = math::binomial_tail(r.N, k, 0.75).log10_value();
    t.rows.push_back({r.length_km, r.N, r.S_obs, k, lp, r.reported_log10_p, r.s_source});
  }
  return t;
}

Table error_budget_report(const std::vector<BudgetColumn>& columns) {
  Table t;
  t.name = "budget";
  t.columns = {"length_km", "row_sum", "stated_total", "infidelity", "within_budget", "sum_matches"};
  for (const auto& c : columns) {
    double sum = 0.0;
    for (const auto& s : c.sources) sum += s.second;
    const double infid = 1.0 - c.measured_fidelity;
    // Both sides carry at most four decimals.
    const bool within = infid <= c.stated_total + 1e-12;
    const bool matches = std::abs(sum - c.stated_total) <= 1e-4;
    t.rows.push_back({c.length_km, sum, c.stated_total, infid, std::int64_t{within}, std::int64_t{matches}});
  }
  return t;
}

}  // namespace diqkd

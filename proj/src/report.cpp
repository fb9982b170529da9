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

#include "diqkd/report.hpp"

#include "json.hpp"

#include "diqkd/io.hpp"

namespace diqkd {
namespace {

using Json = nlohmann::ordered_json;

Json to_json(const KeyRateReport& r, bool timing) {
  Json j;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["mode"] = r.analytic ? "analytic" : "simulated";
  j["method"] = method_name(r.method);
  Json inputs = Json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  j["inputs"] = inputs;
  j["model"] = {{"S", r.model.S}, {"Q", r.model.Q}, {"omega", r.model.omega}, {"fidelity", r.model.fidelity}};
  j["protocol"] = {{"n", r.params.n},
                   {"gamma_A", r.params.gamma_A},
                   {"gamma_B", r.params.gamma_B},
                   {"omega_exp", r.params.omega_exp},
                   {"q_exp", r.q_exp},
                   {"delta", r.params.delta}};
  if (r.analytic) {
    j["estimates"] = nullptr;
  } else {
    const auto& e = r.estimate;
    j["estimates"] = {{"S_hat", e.S_hat},         {"S_err", e.S_err},   {"Q_hat", e.Q_hat},
                      {"Q_err", e.Q_err},         {"beta_freq", r.beta_freq},
                      {"c_counts", e.c_counts},   {"c_freq", r.c_freq}, {"flagged", e.flagged}};
  }
  j["accepted"] = !r.aborted;
  j["accepted_eat"] = r.accepted_eat;
  j["accepted_renyi"] = r.accepted_renyi;
  j["leak_ec"] = {{"bits", r.leak.bits}, {"eps_tilde", r.leak.eps_tilde}};
  if (r.eat) {
    const auto& e = *r.eat;
    j["eat"] = {{"bits", e.bits},
                {"bits_raw", e.bits_raw},
                {"rate", e.rate},
                {"rate_raw", e.rate_raw},
                {"p_t", e.p_t},
                {"omega_in", e.omega_in},
                {"delta", e.delta},
                {"eps_split",
                 {{"eps_snd", e.budget.eps_snd},
                  {"eps_EC", e.budget.eps_EC},
                  {"eps_PA", e.budget.eps_PA},
                  {"eps_s", e.budget.eps_s},
                  {"eps_s_prime", e.budget.eps_s_prime},
                  {"eps_s_dprime", e.budget.eps_s_dprime},
                  {"eps_EA", e.budget.eps_EA}}}};
  } else {
    j["eat"] = nullptr;
  }
  if (r.renyi) {
    const auto& e = *r.renyi;
    j["renyi"] = {{"bits", e.bits},   {"bits_raw", e.bits_raw}, {"rate", e.rate},
                  {"rate_raw", e.rate_raw}, {"alpha", e.alpha}, {"h_alpha", e.h_alpha},
                  {"omega_sigma", e.omega_sigma}};
    if (r.acceptance) {
      const auto& a = *r.acceptance;
      j["renyi"]["acceptance"] = {{"q_hon", {a.q_hon.q0, a.q_hon.q1, a.q_hon.q_perp}},
                                  {"delta_low", a.delta_low},
                                  {"delta_upp", a.delta_upp}};
    }
  } else {
    j["renyi"] = nullptr;
  }
  j["asymptotic"] = {{"sifted", r.rate_asym_sifted}, {"nosift", r.rate_asym_nosift}};
  j["rng"] = "philox4x32-10";
  j["rng_draws"] = r.rng_draws;
  if (timing && r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
  return j;
}

void flatten(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else {
    std::string v;
    if (j.is_number_float()) {
      v = io::fmt17(j.get<double>());
    } else if (j.is_string()) {
      v = j.get<std::string>();
    } else {
      v = j.dump();
    }
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    out += prefix + "," + v + "\n";
  }
}

std::string cell_csv(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return io::fmt17(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

Json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::kEat:
      return "eat";
    case Method::kRenyi:
      return "renyi";
    default:
      return "both";
  }
}

std::string report_to_json(const KeyRateReport& report, bool include_timing) {
  return to_json(report, include_timing).dump(2) + "\n";
}

std::string report_to_csv(const KeyRateReport& report, bool include_timing) {
  std::string out = "# config_hash=" + report.config_hash + "\nkey,value\n";
  flatten(to_json(report, include_timing), "", out);
  return out;
}

std::string table_to_csv(const Table& table, const std::string& config_hash) {
  std::string out = "# config_hash=" + config_hash + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_csv(row[i]);
    out += "\n";
  }
  return out;
}

std::string table_to_json(const Table& table, const std::string& config_hash) {
  Json j;
  j["config_hash"] = config_hash;
  j["table"] = table.name;
  j["columns"] = table.columns;
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace diqkd

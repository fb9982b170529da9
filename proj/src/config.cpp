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

#include "diqkd/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "diqkd/errors.hpp"
#include "diqkd/io.hpp"

namespace diqkd {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double as_double(const std::string& key, const std::string& v) {
  try {
    return io::parse_double(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

std::int64_t as_int(const std::string& key, const std::string& v) {
  const double d = as_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<std::int64_t>(d);
}

std::uint64_t as_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v[0] == '-') throw ConfigError(key + ": expected an unsigned integer");
  return out;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const std::string& k, double RunConfig::*outer) {
      t[k] = [outer](RunConfig& c, const std::string& key, const std::string& v) { c.*outer = as_double(key, v); };
    };
    auto field = [&t](const std::string& k, std::function<double&(RunConfig&)> ref) {
      t[k] = [ref](RunConfig& c, const std::string& key, const std::string& v) { ref(c) = as_double(key, v); };
    };
    t["physical.v_z"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.v_z = as_double(k, v); };
    t["physical.v_x"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.v_x = as_double(k, v); };
    field("physical.alpha_exc", [](RunConfig& c) -> double& { return c.noise.alpha_exc; });
    field("physical.dephase_lambda", [](RunConfig& c) -> double& { return c.noise.dephase_lambda; });
    field("physical.white_noise", [](RunConfig& c) -> double& { return c.noise.white_noise; });
    field("physical.readout_flip", [](RunConfig& c) -> double& { return c.noise.readout_flip; });
    field("physical.delta_phi", [](RunConfig& c) -> double& { return c.noise.delta_phi; });
    t["physical.sign"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.noise.sign = static_cast<int>(as_int(k, v));
    };

    field("link.collection", [](RunConfig& c) -> double& { return c.link.collection; });
    field("link.fiber_coupling", [](RunConfig& c) -> double& { return c.link.fiber_coupling; });
    field("link.qfc", [](RunConfig& c) -> double& { return c.link.qfc; });
    field("link.insertion", [](RunConfig& c) -> double& { return c.link.insertion; });
    field("link.bsm", [](RunConfig& c) -> double& { return c.link.bsm; });
    field("link.detector", [](RunConfig& c) -> double& { return c.link.detector; });
    field("link.atten_db_per_km", [](RunConfig& c) -> double& { return c.link.atten_db_per_km; });
    field("link.length_km", [](RunConfig& c) -> double& { return c.link.length_km; });
    t["link.measured_arm_transmission"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.link.measured_arm_transmission = as_double(k, v);
    };
    num("link.excitation", &RunConfig::excitation);
    field("timing.overhead_s", [](RunConfig& c) -> double& { return c.timing.overhead_s; });
    field("timing.duty_cycle", [](RunConfig& c) -> double& { return c.timing.duty_cycle; });
    field("timing.c_mps", [](RunConfig& c) -> double& { return c.timing.c_mps; });

    t["protocol.n"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.protocol.n = as_int(k, v); };
    field("protocol.gamma_A", [](RunConfig& c) -> double& { return c.protocol.gamma_A; });
    field("protocol.gamma_B", [](RunConfig& c) -> double& { return c.protocol.gamma_B; });
    t["protocol.omega_exp"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.protocol.omega_exp = as_double(k, v);
      c.omega_given = true;
    };
    t["protocol.delta"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.protocol.delta = as_double(k, v);
      c.delta_given = true;
    };
    num("protocol.completeness", &RunConfig::completeness_target);
    t["protocol.abort_is_error"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.abort_is_error = as_bool(k, v);
    };
    num("analytic.S", &RunConfig::analytic_S);
    num("analytic.Q", &RunConfig::analytic_Q);

    field("security.eps_snd", [](RunConfig& c) -> double& { return c.eat.eps_snd; });
    field("security.eps_EC", [](RunConfig& c) -> double& { return c.eat.eps_EC; });
    field("security.eps_EC_com", [](RunConfig& c) -> double& { return c.eat.eps_EC_com; });
    field("security.eps_tilde", [](RunConfig& c) -> double& { return c.eat.eps_tilde; });
    field("security.eps_com_AT", [](RunConfig& c) -> double& { return c.renyi.eps_com_AT; });
    field("security.alpha", [](RunConfig& c) -> double& { return c.renyi.alpha; });
    t["security.sigma_grid"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.renyi.sigma_grid = static_cast<int>(as_int(k, v));
    };
    t["security.method"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v == "both") {
        c.method = Method::kBoth;
      } else if (v == "eat") {
        c.method = Method::kEat;
      } else if (v == "renyi") {
        c.method = Method::kRenyi;
      } else {
        throw ConfigError(k + ": expected both, eat or renyi");
      }
    };
    t["security.delta_norm"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v == "gamma_eff") {
        c.delta_norm = eat::DeltaNormalization::kGammaEff;
      } else if (v == "gamma_ab") {
        c.delta_norm = eat::DeltaNormalization::kGammaAB;
      } else {
        throw ConfigError(k + ": expected gamma_eff or gamma_ab");
      }
    };

    field("sweep.n_min", [](RunConfig& c) -> double& { return c.sweep.n_min; });
    field("sweep.n_max", [](RunConfig& c) -> double& { return c.sweep.n_max; });
    t["sweep.n_points"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.sweep.n_points = static_cast<int>(as_int(k, v));
    };
    field("sweep.S_min", [](RunConfig& c) -> double& { return c.sweep.S_min; });
    field("sweep.S_max", [](RunConfig& c) -> double& { return c.sweep.S_max; });
    t["sweep.S_points"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.sweep.S_points = static_cast<int>(as_int(k, v));
    };
    field("sweep.Q_min", [](RunConfig& c) -> double& { return c.sweep.Q_min; });
    field("sweep.Q_max", [](RunConfig& c) -> double& { return c.sweep.Q_max; });
    t["sweep.Q_points"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.sweep.Q_points = static_cast<int>(as_int(k, v));
    };
    field("sweep.contour_gamma", [](RunConfig& c) -> double& { return c.sweep.contour_gamma; });

    t["data.distance"] = [](RunConfig& c, const std::string&, const std::string& v) { c.distance_csv = v; };
    t["data.pvalues"] = [](RunConfig& c, const std::string&, const std::string& v) { c.pvalue_csv = v; };
    t["data.budget"] = [](RunConfig& c, const std::string&, const std::string& v) { c.budget_csv = v; };
    t["output.dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; };
    t["output.format"] = [](RunConfig& c, const std::string&, const std::string& v) { c.format = v; };
    t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.protocol.seed = as_u64(k, v); };
    return t;
  }();
  return table;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (cfg.entries.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    it->second(cfg, key, value);
    cfg.entries[key] = value;
  }
  cfg.distance_csv = resolve(cfg.distance_csv, base_dir);
  cfg.pvalue_csv = resolve(cfg.pvalue_csv, base_dir);
  cfg.budget_csv = resolve(cfg.budget_csv, base_dir);

  if (cfg.v_z.has_value() != cfg.v_x.has_value()) throw ConfigError("physical.v_z and physical.v_x go together");
  if (cfg.v_z) {
    if (cfg.entries.count("physical.alpha_exc") || cfg.entries.count("physical.dephase_lambda")) {
      throw ConfigError("give either visibilities or alpha_exc/dephase_lambda, not both");
    }
    try {
      const auto cal = quantum::calibrate_noise(*cfg.v_z, *cfg.v_x);
      cfg.noise.alpha_exc = cal.alpha_exc;
      cfg.noise.dephase_lambda = cal.dephase_lambda;
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("physical calibration: ") + e.what());
    }
  }
  cfg.renyi.eps_sec = cfg.eat.eps_snd - cfg.eat.eps_EC;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), base.empty() ? "." : base);
}

void RunConfig::validate() const {
  try {
    noise.validate();
    link.validate();
    timing.validate();
    if (!(excitation >= 0.0 && excitation <= 1.0)) throw std::domain_error("link.excitation must lie in [0,1]");
    protocol::ProtocolParams p = protocol;
    if (!omega_given) p.omega_exp = 0.8;  // filled in from the model at run time
    p.validate();
    if (!(completeness_target > 0.0 && completeness_target < 1.0)) {
      throw std::domain_error("protocol.completeness must lie in (0,1)");
    }
    if (!(analytic_S > 2.0 && analytic_S <= 2.8284271247461900976 + 1e-12)) {
      throw std::domain_error("analytic.S must lie in (2, 2√2]");
    }
    if (!(analytic_Q >= 0.0 && analytic_Q <= 0.5)) throw std::domain_error("analytic.Q must lie in [0, 1/2]");
    // Whether eps_snd leaves room after eps_EC is a property of the key
    // length, reported as infeasible there.
    if (!(eat.eps_snd > 0.0 && eat.eps_snd < 1.0)) throw std::domain_error("security.eps_snd must lie in (0,1)");
    if (!(eat.eps_EC > 0.0)) throw std::domain_error("security.eps_EC must be positive");
    if (!(eat.eps_EC_com > 0.0 && eat.eps_EC_com < 1.0)) throw std::domain_error("security.eps_EC_com must lie in (0,1)");
    if (!(eat.eps_tilde >= 0.0 && eat.eps_tilde < eat.eps_EC_com)) {
      throw std::domain_error("security.eps_tilde must lie in [0, eps_EC_com)");
    }
    renyi::RenyiConfig r = renyi;
    if (!(r.eps_sec > 0.0)) r.eps_sec = 0.5;
    r.validate();
    if (!(sweep.n_min >= 1.0 && sweep.n_max >= sweep.n_min && sweep.n_points >= 1)) {
      throw std::domain_error("sweep n range is invalid");
    }
    if (!(sweep.S_max >= sweep.S_min && sweep.S_points >= 2 && sweep.Q_max >= sweep.Q_min && sweep.Q_points >= 2)) {
      throw std::domain_error("contour grid is invalid");
    }
    if (!(sweep.S_min >= -4.0 && sweep.S_max <= 2.8284271247461900976 + 1e-12)) {
      throw std::domain_error("contour S range must lie within [-4, 2√2]");
    }
    if (!(sweep.Q_min >= 0.0 && sweep.Q_max <= 0.5)) throw std::domain_error("contour Q range must lie in [0, 1/2]");
    if (format != "json" && format != "csv") throw std::domain_error("output.format must be csv or json");
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [k, v] : entries) {
    if (k == "seed" || k.rfind("output.", 0) == 0) continue;
    feed(k + "=" + v + "\n");
  }
  feed("seed=" + std::to_string(protocol.seed) + "\n");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int workers_from_env() {
  if (const char* env = std::getenv("DIQKD_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096) {
      throw ConfigError("DIQKD_WORKERS must be a positive integer");
    }
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace diqkd

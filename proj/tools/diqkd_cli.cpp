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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "diqkd/config.hpp"
#include "diqkd/errors.hpp"
#include "diqkd/pipeline.hpp"
#include "diqkd/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAbort = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInfeasible = 4;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
  bool analytic = false;
  bool timing = false;
  bool transcript = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "Config file (key = value lines)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "RNG seed; overrides the config");
  cmd->add_option("--out", o.out_dir, "Output directory; overrides output.dir");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

diqkd::RunConfig load(const Options& o) {
  diqkd::RunConfig cfg = o.config_path.empty() ? diqkd::parse_config("") : diqkd::load_config(o.config_path);
  if (o.seed) {
    cfg.protocol.seed = *o.seed;
    cfg.entries["seed"] = std::to_string(*o.seed);
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.format.empty()) cfg.format = o.format;
  cfg.validate();
  return cfg;
}

std::filesystem::path write_file(const diqkd::RunConfig& cfg, const std::string& stem, const std::string& body) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / (stem + "." + cfg.format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw diqkd::ConfigError("cannot write '" + path.string() + "'");
  out << body;
  return path;
}

std::filesystem::path write_table(const diqkd::RunConfig& cfg, const diqkd::Table& t) {
  const std::string hash = cfg.hash();
  return write_file(cfg, t.name,
                    cfg.format == "csv" ? diqkd::table_to_csv(t, hash) : diqkd::table_to_json(t, hash));
}

int run_pipeline(const Options& o, int workers) {
  const auto cfg = load(o);
  const auto rep = diqkd::run_pipeline(cfg, o.analytic, workers);
  const auto path = write_file(cfg, "report",
                               cfg.format == "csv" ? diqkd::report_to_csv(rep, o.timing)
                                                   : diqkd::report_to_json(rep, o.timing));
  if (o.transcript && !o.analytic) {
    // Regenerated from (config, seed); identical to the one the report used.
    auto params = rep.params;
    const auto tr = diqkd::protocol::generate_transcript(
        diqkd::protocol::behavior_from_state(diqkd::quantum::build_heralded_state<double>(cfg.noise),
                                             diqkd::protocol::MeasurementSettings::standard(),
                                             cfg.noise.readout_flip, true),
        params, workers);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "transcript.csv", std::ios::binary);
    diqkd::protocol::write_transcript(out, tr);
  }
  std::printf("%s\n", path.string().c_str());
  if (rep.eat) std::printf("eat    rate %.6f bits/event (raw %.6f)\n", rep.eat->rate, rep.eat->rate_raw);
  if (rep.renyi) {
    std::printf("renyi  rate %.6f bits/event (raw %.6f), %.1f bits\n", rep.renyi->rate, rep.renyi->rate_raw,
                rep.renyi->bits);
  }
  std::printf("asym   rate %.6f bits/event\n", rep.rate_asym_sifted);
  if (rep.aborted) {
    std::fprintf(stderr, "protocol aborted: acceptance test failed\n");
    if (cfg.abort_is_error) return kExitAbort;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-independent QKD simulator and security calculator"};
  app.require_subcommand(1);
  Options o;

  auto* pipeline = app.add_subcommand("pipeline", "Model, transcript, estimates and key lengths");
  add_common(pipeline, o);
  pipeline->add_flag("--analytic", o.analytic, "Evaluate formulas at analytic.S/Q without a transcript");
  pipeline->add_flag("--timing", o.timing, "Include wall time in the report");
  pipeline->add_flag("--transcript", o.transcript, "Also write transcript.csv");

  auto* sweep_n = app.add_subcommand("sweep-n", "Finite-size key rate versus rounds");
  auto* contour = app.add_subcommand("contour", "Asymptotic key rate over (S, Q)");
  auto* distance = app.add_subcommand("distance", "Link rates and key rate versus fiber length");
  auto* pvalues = app.add_subcommand("pvalues", "CHSH p-values of the measured rows");
  auto* budget = app.add_subcommand("budget", "Infidelity budget check");
  for (auto* cmd : {sweep_n, contour, distance, pvalues, budget}) {
    add_common(cmd, o);
    cmd->add_flag("--analytic", o.analytic, "Accepted for symmetry; sweeps are analytic");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const int workers = diqkd::workers_from_env();
    if (pipeline->parsed()) return run_pipeline(o, workers);

    const auto cfg = load(o);
    if (sweep_n->parsed()) {
      std::printf("%s\n", write_table(cfg, diqkd::sweep_keyrate_vs_n(cfg, workers)).string().c_str());
    } else if (contour->parsed()) {
      const auto c = diqkd::sweep_asymptotic_contour(cfg, workers);
      std::printf("%s\n", write_table(cfg, c.grid).string().c_str());
      std::printf("%s\n", write_table(cfg, c.zero).string().c_str());
    } else if (distance->parsed()) {
      const auto rows = diqkd::load_distance_rows(cfg.distance_csv);
      std::printf("%s\n", write_table(cfg, diqkd::sweep_rate_vs_distance(cfg, rows, workers)).string().c_str());
    } else if (pvalues->parsed()) {
      const auto rows = diqkd::load_pvalue_rows(cfg.pvalue_csv);
      std::printf("%s\n", write_table(cfg, diqkd::pvalue_table(rows)).string().c_str());
    } else if (budget->parsed()) {
      const auto cols = diqkd::load_error_budget(cfg.budget_csv);
      std::printf("%s\n", write_table(cfg, diqkd::error_budget_report(cols)).string().c_str());
    }
    return kExitOk;
  } catch (const diqkd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const diqkd::InfeasibleError& e) {
    std::fprintf(stderr, "numerically infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

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

#pragma once

#include <algorithm>
#include <array>
#include <exception>
#include <map>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "diqkd/config.hpp"
#include "diqkd/eat.hpp"
#include "diqkd/protocol.hpp"
#include "diqkd/renyi.hpp"

namespace diqkd {

/// Quantities the calibrated state predicts for the standard settings.
struct ModelPrediction {
  double S = 0.0;
  double Q = 0.0;
  double omega = 0.0;
  double fidelity = 0.0;
};

ModelPrediction predict(const quantum::NoiseParams& noise);

struct KeyRateReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  bool analytic = false;
  Method method = Method::kBoth;
  std::map<std::string, std::string> inputs;

  ModelPrediction model;
  protocol::ProtocolParams params;
  double q_exp = 0.0;

  // Simulated mode only.
  protocol::Estimate estimate;
  double beta_freq = 0.0;
  std::array<double, 3> c_freq{};

  bool accepted_eat = true;
  bool accepted_renyi = true;
  bool aborted = false;

  eat::LeakEc leak;
  std::optional<eat::EatKeyLength> eat;
  std::optional<renyi::RenyiKeyLength> renyi;
  std::optional<renyi::AcceptanceSet> acceptance;
  double rate_asym_sifted = 0.0;
  double rate_asym_nosift = 0.0;

  std::uint64_t rng_draws = 0;
  std::optional<double> wall_time_s;
};

/// State, behavior, transcript, estimates, acceptance and key lengths. In
/// analytic mode the formulas are evaluated at (analytic.S, analytic.Q) and
/// no transcript is generated. Key lengths are always evaluated at the
/// honest model (ω_exp, Q) the protocol was configured with; a failed
/// acceptance test zeroes that method's key.
KeyRateReport run_pipeline(const RunConfig& config, bool analytic, int workers);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Index of a named column; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& col) const;
};

/// Log-spaced n grid from the sweep section; columns n, rate_eat,
/// rate_renyi, rate_asym at (analytic.S, analytic.Q).
Table sweep_keyrate_vs_n(const RunConfig& config, int workers);
Table sweep_keyrate_vs_n(const RunConfig& config, const std::vector<double>& n_grid, int workers);

struct ContourResult {
  Table grid;  // S, Q, rate
  Table zero;  // Q, S_zero
};

/// g(ω(S)) - h(Q) on the S × Q grid and the S where it vanishes for each Q.
ContourResult sweep_asymptotic_contour(const RunConfig& config, int workers);

struct DistanceRow {
  double length_km = 0.0;
  double fiber_transmission = 0.0;
  double excitation = 0.0;
  double v_z = 0.0;
  double v_x = 0.0;
  double fidelity_target = 0.0;
  bool reconstructed = false;
};

std::vector<DistanceRow> load_distance_rows(const std::string& path);

/// Arm efficiency, SPI/TPI success probabilities and event rates, predicted
/// S, Q and fidelity, and the no-sift asymptotic rate per event and per
/// second.
Table sweep_rate_vs_distance(const RunConfig& config, const std::vector<DistanceRow>& rows, int workers);

struct PvalueRow {
  double length_km = 0.0;
  std::int64_t N = 0;
  double S_obs = 0.0;
  double reported_log10_p = 0.0;
  std::string s_source;
};

std::vector<PvalueRow> load_pvalue_rows(const std::string& path);

/// k = round(N ω(S_obs)) and log10 P[X >= k] for X ~ Binomial(N, 3/4).
Table pvalue_table(const std::vector<PvalueRow>& rows);

struct BudgetColumn {
  double length_km = 0.0;
  std::vector<std::pair<std::string, double>> sources;
  double stated_total = 0.0;
  double measured_fidelity = 0.0;
};

std::vector<BudgetColumn> load_error_budget(const std::string& path);

/// Per distance: re-summed rows, stated total, 1 - F and whether it fits.
Table error_budget_report(const std::vector<BudgetColumn>& columns);

/// Runs fn(i) for i in [0, count) on up to `workers` threads and returns the
/// results in index order.
template <typename Fn>
auto parallel_map(std::size_t count, int workers, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t nw = std::max<std::size_t>(1, std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1))));
  auto body = [&](std::size_t w) {
    for (std::size_t i = w; i < count; i += nw) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nw == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

}  // namespace diqkd

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

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "diqkd/eat.hpp"
#include "diqkd/link.hpp"
#include "diqkd/protocol.hpp"
#include "diqkd/quantum.hpp"
#include "diqkd/renyi.hpp"

namespace diqkd {

enum class Method { kBoth, kEat, kRenyi };

struct SweepConfig {
  double n_min = 1e4;
  double n_max = 1e10;
  int n_points = 25;
  double S_min = 2.0;
  double S_max = 2.8284271247461900976;
  int S_points = 41;
  double Q_min = 0.0;
  double Q_max = 0.12;
  int Q_points = 41;
  /// Test fraction of the no-sift protocol behind the contour; recorded only.
  double contour_gamma = 1e-3;
};

struct RunConfig {
  /// Heralded-state noise after calibration.
  quantum::NoiseParams noise;
  /// Visibilities the noise was calibrated from, when given.
  std::optional<double> v_z;
  std::optional<double> v_x;

  link::LinkBudget link;
  double excitation = 0.022;
  link::TimingModel timing;

  protocol::ProtocolParams protocol;
  bool omega_given = false;
  bool delta_given = false;
  double completeness_target = 0.01;
  bool abort_is_error = true;

  double analytic_S = 2.612;
  double analytic_Q = 0.0285;

  eat::EatBudget eat;
  eat::DeltaNormalization delta_norm = eat::DeltaNormalization::kGammaEff;
  renyi::RenyiConfig renyi;
  Method method = Method::kBoth;

  SweepConfig sweep;

  std::string distance_csv;
  std::string pvalue_csv;
  std::string budget_csv;

  std::string out_dir = ".";
  std::string format = "json";

  /// Canonical "key = value" entries as read, for hashing and echoing.
  std::map<std::string, std::string> entries;

  /// Validates every section against its module's invariants; throws
  /// ConfigError.
  void validate() const;
  /// FNV-1a over the canonical entries and the seed, as 16 hex digits.
  std::string hash() const;
};

/// Parses "section.key = value" lines; '#' starts a comment. Relative data
/// paths resolve against base_dir. Unknown keys throw ConfigError.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Worker count from DIQKD_WORKERS, defaulting to the hardware concurrency.
int workers_from_env();

}  // namespace diqkd

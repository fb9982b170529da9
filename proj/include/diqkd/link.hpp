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

#include <optional>

namespace diqkd::link {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Per-arm optical budget. length_km is the total node-to-node fiber length;
/// each arm carries half of it.
struct LinkBudget {
  double collection = 0.085;
  double fiber_coupling = 0.5;
  double qfc = 0.47;
  double insertion = 0.86;
  double bsm = 0.765;
  double detector = 0.85;
  double atten_db_per_km = 0.32;
  double length_km = 0.0;
  /// Measured transmission of one arm's fiber; replaces the analytic term.
  std::optional<double> measured_arm_transmission;

  void validate() const;
};

struct TimingModel {
  double overhead_s = 12e-6;
  double duty_cycle = 0.15;
  double c_mps = kSpeedOfLight;

  void validate() const;
};

/// Optical path lengths (m) at one node and the wave numbers (rad/m) of the
/// 780-nm, telecom and pump fields.
struct PhasePaths {
  double l780 = 0.0;
  double l_signal = 0.0;
  double l_wg = 0.0;
  double l_tel = 0.0;
  double l_pump = 0.0;
  double k_pho = 0.0;
  double k_tel = 0.0;
  double k_pump = 0.0;

  void validate() const;
};

/// 10^(-atten (L/2) / 10).
double fiber_transmission(double atten_db_per_km, double length_km);

double arm_efficiency(const LinkBudget& budget);

/// α_A η_A + α_B η_B. Throws std::domain_error if the result exceeds 1.
double success_probability_spi(double alpha_a, double eta_a, double alpha_b, double eta_b);

/// 0.5 η_A η_B.
double success_probability_tpi(double eta_a, double eta_b);

/// Heralded events per second: p_s · duty / (overhead + 3L/2c).
double event_rate(double p_s, const TimingModel& timing, double length_km);

/// Interferometer phase difference in (-π, π]. Wave numbers are shared by the
/// two nodes; a mismatch throws.
double phase_difference(const PhasePaths& a, const PhasePaths& b);

}  // namespace diqkd::link

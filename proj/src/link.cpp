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

#include "diqkd/link.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace diqkd::link {
namespace {

void check_eff(double e, const char* what) {
  if (!(e >= 0.0 && e <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0,1]");
  }
}

}  // namespace

void LinkBudget::validate() const {
  check_eff(collection, "collection");
  check_eff(fiber_coupling, "fiber_coupling");
  check_eff(qfc, "qfc");
  check_eff(insertion, "insertion");
  check_eff(bsm, "bsm");
  check_eff(detector, "detector");
  if (measured_arm_transmission) check_eff(*measured_arm_transmission, "measured_arm_transmission");
  if (!(atten_db_per_km >= 0.0)) throw std::domain_error("attenuation must be nonnegative");
  if (!(length_km >= 0.0)) throw std::domain_error("length must be nonnegative");
}

void TimingModel::validate() const {
  if (!(overhead_s > 0.0)) throw std::domain_error("overhead must be positive");
  if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) throw std::domain_error("duty cycle must lie in (0,1]");
  if (!(c_mps > 0.0)) throw std::domain_error("speed of light must be positive");
}

void PhasePaths::validate() const {
  for (double l : {l780, l_signal, l_wg, l_tel, l_pump}) {
    if (!(l >= 0.0)) throw std::domain_error("path lengths must be nonnegative");
  }
  for (double k : {k_pho, k_tel, k_pump}) {
    if (!(k > 0.0)) throw std::domain_error("wave numbers must be positive");
  }
}

double fiber_transmission(double atten_db_per_km, double length_km) {
  return std::pow(10.0, -atten_db_per_km * 0.5 * length_km / 10.0);
}

double arm_efficiency(const LinkBudget& b) {
  b.validate();
  const double fiber = b.measured_arm_transmission.value_or(fiber_transmission(b.atten_db_per_km, b.length_km));
  return b.collection * b.fiber_coupling * b.qfc * b.insertion * b.bsm * b.detector * fiber;
}

double success_probability_spi(double alpha_a, double eta_a, double alpha_b, double eta_b) {
  for (double v : {alpha_a, eta_a, alpha_b, eta_b}) check_eff(v, "spi input");
  const double p = alpha_a * eta_a + alpha_b * eta_b;
  if (p > 1.0) throw std::domain_error("success_probability_spi: p_s exceeds 1");
  return p;
}

double success_probability_tpi(double eta_a, double eta_b) {
  check_eff(eta_a, "eta_a");
  check_eff(eta_b, "eta_b");
  return 0.5 * eta_a * eta_b;
}

double event_rate(double p_s, const TimingModel& timing, double length_km) {
  timing.validate();
  check_eff(p_s, "p_s");
  if (!(length_km >= 0.0)) throw std::domain_error("length must be nonnegative");
  return p_s * timing.duty_cycle / (timing.overhead_s + 1.5 * length_km * 1000.0 / timing.c_mps);
}

double phase_difference(const PhasePaths& a, const PhasePaths& b) {
  a.validate();
  b.validate();
  if (a.k_pho != b.k_pho || a.k_tel != b.k_tel || a.k_pump != b.k_pump) {
    throw std::invalid_argument("phase_difference: nodes must share wave numbers");
  }
  const double phi = a.k_pho * ((a.l780 - b.l780) + (a.l_signal - b.l_signal)) +
                     a.k_tel * ((a.l_wg - b.l_wg) + (a.l_tel - b.l_tel)) +
                     a.k_pump * (a.l_pump - b.l_pump);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(phi, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

}  // namespace diqkd::link

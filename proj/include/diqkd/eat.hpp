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

namespace diqkd::eat {

inline constexpr double kEpsEC = 0x1.0p-61;
inline constexpr double kLeakEV = 64.0;

/// Error parameters of the original-EAT key length. The split fields are
/// filled in by key_length_eat; eps_tilde <= 0 asks leak_ec to choose it.
struct EatBudget {
  double eps_snd = 1e-5;
  double eps_EC = kEpsEC;
  double eps_PA = 0.0;
  double eps_s = 0.0;
  double eps_s_prime = 0.0;
  double eps_s_dprime = 0.0;
  double eps_EA = 0.0;
  double eps_EC_com = 0.005;
  double eps_tilde = 0.0;

  /// Checks the split: eps_s - eps_s' - 2 eps_s'' > 0,
  /// eps_EC + eps_PA + eps_s <= eps_snd, eps_EA + eps_EC <= eps_PA + eps_s.
  void validate() const;
};

struct HonestModel {
  double omega = 0.8265;
  double q = 0.0285;
  double gamma_A = 0.26;
  double gamma_B = 0.13;

  static HonestModel from_chsh(double S, double Q, double gamma_A, double gamma_B);
  void validate() const;
};

/// How the acceptance slack δ shifts the win probability fed to η_opt.
enum class DeltaNormalization { kGammaEff, kGammaAB };

double gamma_eff(double gamma_A, double gamma_B);

/// 1 - h(1/2 + sqrt(16ω(ω-1)+3)/2) on [3/4, (2+√2)/4].
double g_func(double omega);
/// dg/dω; finite at ω = 3/4 and unbounded at the upper end.
double g_slope(double omega);
/// g below ω_t, tangent at ω_t above it. Values of ω below 3/4 on the g
/// branch give 0.
double f_func(double omega, double omega_t);

double eta_func(double omega, double omega_t, double eps, double eps_e, double n, double gamma_A,
                double gamma_B);

struct EtaOpt {
  double value = 0.0;  // max(raw, 0)
  double raw = 0.0;
  double p_t = 0.0;
};

/// Maximum of η over p_t: 256-point scan, then golden-section refinement in
/// the best cell.
EtaOpt eta_opt(double omega_in, double eps, double eps_e, double n, double gamma_A, double gamma_B);

/// (1 - γ_A/2)(1 - γ_B) h(q) + γ_A γ_B h(ω).
double eta_inf(const HonestModel& m);

struct LeakEc {
  double bits = 0.0;
  double eps_tilde = 0.0;
};

/// eps_tilde <= 0 selects the value minimizing the bound.
LeakEc leak_ec(double n, const HonestModel& m, double eps_EC_com, double eps_tilde = 0.0);

/// 2^{-n D(c || γ_A γ_B ω_exp)}; 1 when c >= γ_A γ_B ω_exp.
double completeness_ea(double n, double c, double gamma_A, double gamma_B, double omega_exp);

/// δ with completeness_ea(n, μ - δ) = target, μ = γ_A γ_B ω_exp. Returns μ
/// when even the zero threshold misses the target.
double delta_for_completeness(double n, double gamma_A, double gamma_B, double omega_exp,
                              double target);

/// 1 - 2 log2 ε.
double vartheta(double eps);

struct EatKeyLength {
  double bits = 0.0;
  double bits_raw = 0.0;
  double rate = 0.0;
  double rate_raw = 0.0;
  EatBudget budget;
  double p_t = 0.0;
  double omega_in = 0.0;
  double delta = 0.0;
  double leak_ec = 0.0;
};

/// Key length at the budget's given split.
EatKeyLength key_length_eat_at(double n, const HonestModel& m, const EatBudget& budget, double delta,
                               DeltaNormalization norm = DeltaNormalization::kGammaEff);

/// Key length with the split (eps_s, eps_s', eps_s'', eps_PA, eps_EA)
/// chosen by coordinate descent. Throws InfeasibleError when eps_snd leaves
/// no room after eps_EC.
EatKeyLength key_length_eat(double n, const HonestModel& m, const EatBudget& budget, double delta,
                            DeltaNormalization norm = DeltaNormalization::kGammaEff);

/// γ_eff g(ω) - η∞ - γ_A γ_B.
double asymptotic_rate_sifted(double S, double Q, double gamma_A, double gamma_B);
/// g(ω) - h(Q).
double asymptotic_rate_nosift(double S, double Q);

}  // namespace diqkd::eat

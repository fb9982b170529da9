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

#include <array>
#include <cstdint>

#include "diqkd/eat.hpp"
#include "diqkd/mathcore.hpp"

namespace diqkd::renyi {

using math::Distribution3;

/// Box around q_hon, intersected with the probability simplex.
struct AcceptanceSet {
  Distribution3 q_hon;
  std::array<double, 3> delta_low{};
  std::array<double, 3> delta_upp{};

  double lower(int c) const;
  double upper(int c) const;
  /// Box ∩ simplex is nonempty.
  bool feasible() const;
  /// Observed frequencies lie in the box, with 1e-12 slack for rounding.
  bool contains(const Distribution3& freq) const;
};

struct RenyiConfig {
  /// Rényi order; values <= 1 ask key_length_renyi to optimize it.
  double alpha = 0.0;
  double eps_sec = 1e-5 - eat::kEpsEC;
  double eps_com_AT = 0.005;
  int sigma_grid = 256;

  void validate() const;
};

/// (γ_A γ_B (1-ω), γ_A γ_B ω, 1 - γ_A γ_B).
Distribution3 q_honest(double gamma_A, double gamma_B, double omega_exp);
Distribution3 p_model(double omega_sigma, double gamma_A, double gamma_B);

/// Per-symbol tolerances from exact binomial quantiles at level eps_com_AT/6.
AcceptanceSet build_acceptance_set(const Distribution3& q_hon, std::int64_t n, double eps_com_AT);

/// 2^{(1-α) H} for the key-round entropy H at CHSH value S. S < 2 gives 1.
double renyi_entropy_factor(double S, double alpha);
/// H = log2(factor) / (1 - α), evaluated without cancellation near α = 1.
double renyi_key_entropy(double S, double alpha);

struct SiftWeights {
  double w_key = 1.0;
  double w_rest = 0.0;
};
SiftWeights sift_weights(double gamma_A, double gamma_B);

double sifted_entropy_bound(double alpha, double gamma_A, double gamma_B, double S);

struct HAlpha {
  double value = 0.0;
  double omega_sigma = 0.0;
  Distribution3 q;
};

/// min over q in the acceptance box of D(q || p_M(σ)) / (α-1) + q(⊥) H_sift
/// for fixed ω_σ. The optimum is q_c ∝ p̃_c clipped to the box, with
/// p̃_⊥ = p_⊥ 2^{-(α-1) H_sift}; the constant is found by bisection.
HAlpha inner_minimum(double alpha, double omega_sigma, double gamma_A, double gamma_B,
                     const AcceptanceSet& acc);

/// Infimum over ω_σ ∈ [1/2, (2+√2)/4] (grid of sigma_grid points, then
/// golden-section refinement) of inner_minimum. Throws InfeasibleError for
/// an empty box.
HAlpha h_alpha(double alpha, int sigma_grid, double gamma_A, double gamma_B, const AcceptanceSet& acc);

struct RenyiKeyLength {
  double bits = 0.0;
  double bits_raw = 0.0;
  double rate = 0.0;
  double rate_raw = 0.0;
  double alpha = 0.0;
  double h_alpha = 0.0;
  double omega_sigma = 0.0;
};

/// Key length at fixed α.
RenyiKeyLength key_length_renyi_at(double alpha, double n, const eat::HonestModel& m,
                                   const RenyiConfig& config, const AcceptanceSet& acc,
                                   double leak_ec);

/// Key length with α from config, or optimized over α - 1 on a 64-point
/// log grid in [1e-6, 1] refined once between the neighbours of the best.
RenyiKeyLength key_length_renyi(double n, const eat::HonestModel& m, const RenyiConfig& config,
                                const AcceptanceSet& acc, double leak_ec);

}  // namespace diqkd::renyi

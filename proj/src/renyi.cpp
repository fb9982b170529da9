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

#include "diqkd/renyi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "diqkd/errors.hpp"

namespace diqkd::renyi {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
const double kOmegaMax = (2.0 + std::sqrt(2.0)) / 4.0;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
constexpr double kTsirelson = 2.8284271247461900976;

double objective(double alpha, const Distribution3& q, const Distribution3& p, double h_sift) {
  const double d = math::kl_divergence3(q, p);
  return d / (alpha - 1.0) + q.q_perp * h_sift;
}

}  // namespace

double AcceptanceSet::lower(int c) const { return std::max(0.0, q_hon[c] - delta_low[c]); }
double AcceptanceSet::upper(int c) const { return std::min(1.0, q_hon[c] + delta_upp[c]); }

bool AcceptanceSet::feasible() const {
  double lo = 0.0;
  double hi = 0.0;
  for (int c = 0; c < 3; ++c) {
    if (lower(c) > upper(c)) return false;
    lo += lower(c);
    hi += upper(c);
  }
  return lo <= 1.0 + 1e-12 && hi >= 1.0 - 1e-12;
}

bool AcceptanceSet::contains(const Distribution3& freq) const {
  for (int c = 0; c < 3; ++c) {
    if (freq[c] < q_hon[c] - delta_low[c] - 1e-12 || freq[c] > q_hon[c] + delta_upp[c] + 1e-12) return false;
  }
  return true;
}

void RenyiConfig::validate() const {
  if (alpha > 1.0 && !(alpha <= 2.0)) throw std::domain_error("RenyiConfig: α must lie in (1, 2]");
  if (!(eps_sec > 0.0 && eps_sec < 1.0)) throw std::domain_error("RenyiConfig: eps_sec must lie in (0,1)");
  if (!(eps_com_AT > 0.0)) throw std::domain_error("RenyiConfig: eps_com_AT must be positive");
  if (sigma_grid < 2) throw std::domain_error("RenyiConfig: sigma_grid must be at least 2");
}

Distribution3 q_honest(double gamma_A, double gamma_B, double omega_exp) {
  return p_model(omega_exp, gamma_A, gamma_B);
}

Distribution3 p_model(double omega_sigma, double gamma_A, double gamma_B) {
  if (!(omega_sigma >= 0.0 && omega_sigma <= 1.0)) throw std::domain_error("p_model: ω must lie in [0,1]");
  if (!(gamma_A >= 0.0 && gamma_A <= 1.0 && gamma_B >= 0.0 && gamma_B <= 1.0)) {
    throw std::domain_error("p_model: γ must lie in [0,1]");
  }
  const double t = gamma_A * gamma_B;
  return {t * (1.0 - omega_sigma), t * omega_sigma, 1.0 - t};
}

AcceptanceSet build_acceptance_set(const Distribution3& q_hon, std::int64_t n, double eps_com_AT) {
  if (n < 1) throw std::domain_error("build_acceptance_set: n must be positive");
  AcceptanceSet acc;
  acc.q_hon = q_hon;
  const double level = std::min(eps_com_AT / 6.0, 1.0);
  for (int c = 0; c < 3; ++c) {
    const auto box = math::binomial_box(n, q_hon[c], level);
    acc.delta_low[c] = box.delta_low;
    acc.delta_upp[c] = box.delta_upp;
  }
  return acc;
}

double renyi_entropy_factor(double S, double alpha) {
  return std::exp2((1.0 - alpha) * renyi_key_entropy(S, alpha));
}

double renyi_key_entropy(double S, double alpha) {
  if (!(alpha > 1.0)) throw std::domain_error("renyi_key_entropy: α must exceed 1");
  if (S > kTsirelson + 1e-12) throw std::domain_error("renyi_key_entropy: S exceeds 2√2");
  if (S <= 2.0) return 0.0;
  const double r = std::sqrt(std::min(S * S / 4.0 - 1.0, 1.0));
  // bracket B = Σ p^{1/α}; H = 1 + α log2(B) / (1 - α), with
  // B - 1 = Σ p (p^{1/α - 1} - 1) summed through expm1.
  const double beta = -(alpha - 1.0) / alpha;
  double excess = 0.0;
  for (double p : {(1.0 - r) / 2.0, (1.0 + r) / 2.0}) {
    if (p > 0.0) excess += p * std::expm1(beta * std::log(p));
  }
  const double log2_bracket = std::log1p(excess) / kLn2;
  return std::clamp(1.0 + alpha * log2_bracket / (1.0 - alpha), 0.0, 1.0);
}

SiftWeights sift_weights(double gamma_A, double gamma_B) {
  const double denom = 1.0 - gamma_A * gamma_B;
  if (!(denom > 0.0)) throw std::domain_error("sift_weights: γ_A γ_B must be below 1");
  SiftWeights w;
  w.w_key = (1.0 - gamma_B - 0.5 * gamma_A * (1.0 - gamma_B)) / denom;
  w.w_rest = ((1.0 - gamma_A) * gamma_B + 0.5 * gamma_A * (1.0 - gamma_B)) / denom;
  return w;
}

double sifted_entropy_bound(double alpha, double gamma_A, double gamma_B, double S) {
  const double h = renyi_key_entropy(S, alpha);
  const SiftWeights w = sift_weights(gamma_A, gamma_B);
  // log2(w_key 2^{(1-α)H} + w_rest) / (1-α) with w_key + w_rest = 1.
  const double x = (1.0 - alpha) * h * kLn2;
  return std::log1p(w.w_key * std::expm1(x)) / ((1.0 - alpha) * kLn2);
}

HAlpha inner_minimum(double alpha, double omega_sigma, double gamma_A, double gamma_B,
                     const AcceptanceSet& acc) {
  const Distribution3 p = p_model(omega_sigma, gamma_A, gamma_B);
  const double S = math::winprob_to_chsh(omega_sigma);
  const double h_sift = S <= 2.0 ? 0.0 : sifted_entropy_bound(alpha, gamma_A, gamma_B, std::min(S, kTsirelson));

  HAlpha out;
  out.omega_sigma = omega_sigma;
  // Support: a symbol the model never emits must have q = 0.
  for (int c = 0; c < 3; ++c) {
    if (p[c] == 0.0 && acc.lower(c) > 0.0) {
      out.value = std::numeric_limits<double>::infinity();
      out.q = acc.q_hon;
      return out;
    }
  }
  // log of the tilted weights p̃.
  std::array<double, 3> log_w{};
  for (int c = 0; c < 3; ++c) log_w[c] = p[c] > 0.0 ? std::log(p[c]) : -std::numeric_limits<double>::infinity();
  log_w[2] -= (alpha - 1.0) * h_sift * kLn2;

  auto fill = [&](double log_k) {
    Distribution3 q;
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double v = std::isinf(log_w[c]) ? 0.0 : std::exp(log_w[c] + log_k);
      q[c] = std::clamp(v, acc.lower(c), acc.upper(c));
      total += q[c];
    }
    return std::pair{q, total};
  };
  // Σ q is nondecreasing in log K; bracket the root of Σ q = 1.
  double lo = -800.0;
  double hi = 800.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (fill(mid).second < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Distribution3 q = fill(hi).first;
  // Put the last rounding residue on the coordinate with the most room.
  const double residue = 1.0 - (q.q0 + q.q1 + q.q_perp);
  int slack = 0;
  double room = -1.0;
  for (int c = 0; c < 3; ++c) {
    const double r = residue > 0.0 ? acc.upper(c) - q[c] : q[c] - acc.lower(c);
    if (r > room) {
      room = r;
      slack = c;
    }
  }
  q[slack] += residue;
  out.q = q;
  out.value = objective(alpha, q, p, h_sift);
  return out;
}

HAlpha h_alpha(double alpha, int sigma_grid, double gamma_A, double gamma_B, const AcceptanceSet& acc) {
  if (!(alpha > 1.0)) throw std::domain_error("h_alpha: α must exceed 1");
  if (sigma_grid < 2) throw std::domain_error("h_alpha: sigma_grid must be at least 2");
  if (!acc.feasible()) throw InfeasibleError("h_alpha: acceptance box does not meet the simplex");
  const double lo = 0.5;
  const double hi = kOmegaMax;
  auto at = [&](int j) { return lo + (hi - lo) * j / (sigma_grid - 1); };
  HAlpha best;
  best.value = std::numeric_limits<double>::infinity();
  int best_j = 0;
  for (int j = 0; j < sigma_grid; ++j) {
    const HAlpha r = inner_minimum(alpha, at(j), gamma_A, gamma_B, acc);
    if (r.value < best.value) {
      best = r;
      best_j = j;
    }
  }
  double a = at(std::max(best_j - 1, 0));
  double b = at(std::min(best_j + 1, sigma_grid - 1));
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  HAlpha fc = inner_minimum(alpha, c, gamma_A, gamma_B, acc);
  HAlpha fd = inner_minimum(alpha, d, gamma_A, gamma_B, acc);
  for (int i = 0; i < 60; ++i) {
    if (fc.value <= fd.value) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = inner_minimum(alpha, c, gamma_A, gamma_B, acc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = inner_minimum(alpha, d, gamma_A, gamma_B, acc);
    }
  }
  for (const HAlpha& r : {fc, fd}) {
    if (r.value < best.value) best = r;
  }
  return best;
}

RenyiKeyLength key_length_renyi_at(double alpha, double n, const eat::HonestModel& m,
                                   const RenyiConfig& config, const AcceptanceSet& acc, double leak_ec) {
  const HAlpha h = h_alpha(alpha, config.sigma_grid, m.gamma_A, m.gamma_B, acc);
  RenyiKeyLength out;
  out.alpha = alpha;
  out.h_alpha = h.value;
  out.omega_sigma = h.omega_sigma;
  out.bits_raw = n * h.value - n * (m.gamma_A * m.gamma_B + acc.delta_low[2]) - leak_ec - eat::kLeakEV -
                 alpha / (alpha - 1.0) * std::log2(1.0 / config.eps_sec) + 2.0;
  out.bits = std::max(out.bits_raw, 0.0);
  out.rate_raw = out.bits_raw / n;
  out.rate = out.bits / n;
  return out;
}

RenyiKeyLength key_length_renyi(double n, const eat::HonestModel& m, const RenyiConfig& config,
                                const AcceptanceSet& acc, double leak_ec) {
  config.validate();
  m.validate();
  if (!(n >= 1.0)) throw std::domain_error("key_length_renyi: n must be at least 1");
  if (config.alpha > 1.0) return key_length_renyi_at(config.alpha, n, m, config, acc, leak_ec);

  constexpr int kPoints = 64;
  const double lg_lo = -6.0;
  const double lg_hi = 0.0;
  auto eval = [&](double lg) { return key_length_renyi_at(1.0 + std::pow(10.0, lg), n, m, config, acc, leak_ec); };
  RenyiKeyLength best;
  best.bits_raw = -std::numeric_limits<double>::infinity();
  int best_j = 0;
  const double step = (lg_hi - lg_lo) / (kPoints - 1);
  for (int j = 0; j < kPoints; ++j) {
    const RenyiKeyLength r = eval(lg_lo + step * j);
    if (r.bits_raw > best.bits_raw) {
      best = r;
      best_j = j;
    }
  }
  const double a = lg_lo + step * std::max(best_j - 1, 0);
  const double b = lg_lo + step * std::min(best_j + 1, kPoints - 1);
  for (int j = 0; j < kPoints; ++j) {
    const RenyiKeyLength r = eval(a + (b - a) * j / (kPoints - 1));
    if (r.bits_raw > best.bits_raw) best = r;
  }
  return best;
}

}  // namespace diqkd::renyi

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

#include "diqkd/eat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "diqkd/errors.hpp"
#include "diqkd/mathcore.hpp"

namespace diqkd::eat {
namespace {

constexpr double kOmegaMin = 0.75;
const double kOmegaMax = (2.0 + std::sqrt(2.0)) / 4.0;
constexpr double kLn2 = 0.69314718055994530942;
const double kLog2_9 = std::log2(9.0);
const double kLog2_5 = std::log2(5.0);
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

// sqrt(16ω(ω-1)+3), clamped at the ends of the domain.
double g_radius(double omega) {
  return std::sqrt(std::clamp(16.0 * omega * (omega - 1.0) + 3.0, 0.0, 1.0));
}

void check_omega(double omega, const char* what) {
  if (!(omega >= kOmegaMin - 1e-15 && omega <= kOmegaMax + 1e-15)) {
    throw std::domain_error(std::string(what) + ": ω outside [3/4, (2+√2)/4]");
  }
}

// Maximizes fn on [lo, hi] by golden-section search.
template <typename Fn>
std::pair<double, double> golden_max(Fn&& fn, double lo, double hi, int iters = 60) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int i = 0; i < iters; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct Split {
  std::array<double, 4> u;  // log10 fractions: eps_s, eps_s', eps_s'', eps_EA
};

EatBudget apply_split(const EatBudget& base, const Split& s) {
  EatBudget b = base;
  const double sec = base.eps_snd - base.eps_EC;
  b.eps_s = std::pow(10.0, s.u[0]) * sec;
  b.eps_PA = sec - b.eps_s;
  b.eps_s_prime = std::pow(10.0, s.u[1]) * b.eps_s;
  b.eps_s_dprime = 0.5 * std::pow(10.0, s.u[2]) * b.eps_s;
  b.eps_EA = std::pow(10.0, s.u[3]) * (sec - base.eps_EC);
  return b;
}

bool split_feasible(const Split& s) {
  return std::pow(10.0, s.u[1]) + std::pow(10.0, s.u[2]) < 1.0;
}

EatKeyLength evaluate(double n, const HonestModel& m, const EatBudget& b, double delta,
                      DeltaNormalization norm, const LeakEc& leak) {
  EatKeyLength out;
  out.budget = b;
  out.budget.eps_tilde = leak.eps_tilde;
  out.delta = delta;
  out.leak_ec = leak.bits;
  const double ge = gamma_eff(m.gamma_A, m.gamma_B);
  const double scale = norm == DeltaNormalization::kGammaEff ? ge : m.gamma_A * m.gamma_B;
  out.omega_in = m.omega - delta / scale;
  const double eps_e = b.eps_EA + b.eps_EC;
  const EtaOpt eo = eta_opt(out.omega_in, b.eps_s_prime, eps_e, n, m.gamma_A, m.gamma_B);
  out.p_t = eo.p_t;
  out.bits_raw = n * eo.value - leak.bits - kLeakEV -
                 2.0 * vartheta(b.eps_s - b.eps_s_prime - 2.0 * b.eps_s_dprime) -
                 m.gamma_A * m.gamma_B * n -
                 std::sqrt(n) * kLog2_5 * std::sqrt(1.0 - 2.0 * std::log2(b.eps_s_dprime * eps_e)) -
                 2.0 * std::log2(1.0 / b.eps_PA);
  out.bits = std::max(out.bits_raw, 0.0);
  out.rate_raw = out.bits_raw / n;
  out.rate = out.bits / n;
  return out;
}

}  // namespace

void EatBudget::validate() const {
  for (double e : {eps_snd, eps_EC, eps_PA, eps_s, eps_s_prime, eps_s_dprime, eps_EA, eps_EC_com}) {
    if (!(e > 0.0 && e < 1.0)) throw std::domain_error("EatBudget: every ε must lie in (0,1)");
  }
  if (!(eps_s - eps_s_prime - 2.0 * eps_s_dprime > 0.0)) {
    throw std::domain_error("EatBudget: need eps_s - eps_s' - 2 eps_s'' > 0");
  }
  const double tol = 1e-12 * eps_snd;
  if (eps_EC + eps_PA + eps_s > eps_snd + tol) {
    throw std::domain_error("EatBudget: eps_EC + eps_PA + eps_s exceeds eps_snd");
  }
  if (eps_EA + eps_EC > eps_PA + eps_s + tol) {
    throw std::domain_error("EatBudget: eps_EA + eps_EC exceeds eps_PA + eps_s");
  }
  if (!(eps_tilde >= 0.0 && eps_tilde < eps_EC_com)) {
    throw std::domain_error("EatBudget: need 0 <= eps_tilde < eps_EC_com");
  }
}

HonestModel HonestModel::from_chsh(double S, double Q, double gamma_A, double gamma_B) {
  HonestModel m{math::chsh_to_winprob(S), Q, gamma_A, gamma_B};
  m.validate();
  return m;
}

void HonestModel::validate() const {
  if (!(omega > kOmegaMin && omega <= kOmegaMax + 1e-15)) {
    throw std::domain_error("HonestModel: ω must lie in (3/4, (2+√2)/4]");
  }
  if (!(q >= 0.0 && q <= 0.5)) throw std::domain_error("HonestModel: q must lie in [0, 1/2]");
  if (!(gamma_A >= 0.0 && gamma_A <= 1.0 && gamma_B >= 0.0 && gamma_B <= 1.0)) {
    throw std::domain_error("HonestModel: γ must lie in [0,1]");
  }
}

double gamma_eff(double gamma_A, double gamma_B) {
  if (!(gamma_A >= 0.0 && gamma_A <= 1.0 && gamma_B >= 0.0 && gamma_B <= 1.0)) {
    throw std::domain_error("gamma_eff: γ must lie in [0,1]");
  }
  return 1.0 - gamma_A / 2.0 - gamma_B + 1.5 * gamma_A * gamma_B;
}

double g_func(double omega) {
  check_omega(omega, "g_func");
  return 1.0 - math::binary_entropy(0.5 + 0.5 * g_radius(omega));
}

double g_slope(double omega) {
  check_omega(omega, "g_slope");
  const double r = g_radius(omega);
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  // log2((1+r)/(1-r)) / r = 2 atanh(r) / (r ln 2), with its r -> 0 limit.
  const double ratio = r < 1e-8 ? 2.0 / kLn2 : 2.0 * std::atanh(r) / (r * kLn2);
  return ratio * (32.0 * omega - 16.0) / 4.0;
}

double f_func(double omega, double omega_t) {
  if (omega <= omega_t) return omega <= kOmegaMin ? 0.0 : g_func(omega);
  return g_slope(omega_t) * (omega - omega_t) + g_func(omega_t);
}

double eta_func(double omega, double omega_t, double eps, double eps_e, double n, double gamma_A,
                double gamma_B) {
  const double ge = gamma_eff(gamma_A, gamma_B);
  const double penalty = 2.0 / std::sqrt(n) * (kLog2_9 + std::ceil(ge * g_slope(omega_t))) *
                         std::sqrt(1.0 - 2.0 * std::log2(eps * eps_e));
  return ge * f_func(omega, omega_t) - penalty;
}

EtaOpt eta_opt(double omega_in, double eps, double eps_e, double n, double gamma_A, double gamma_B) {
  constexpr int kGrid = 256;
  auto eta_at = [&](double pt) { return eta_func(omega_in, pt, eps, eps_e, n, gamma_A, gamma_B); };
  auto grid_point = [](int j) { return kOmegaMin + (j + 0.5) / kGrid * (kOmegaMax - kOmegaMin); };
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < kGrid; ++j) {
    const double v = eta_at(grid_point(j));
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  EtaOpt out;
  out.p_t = grid_point(best);
  out.raw = best_val;
  const double lo = best == 0 ? grid_point(0) : grid_point(best - 1);
  const double hi = best == kGrid - 1 ? grid_point(kGrid - 1) : grid_point(best + 1);
  const auto [pt, val] = golden_max(eta_at, lo, hi);
  if (val > out.raw) {
    out.raw = val;
    out.p_t = pt;
  }
  out.value = std::max(out.raw, 0.0);
  return out;
}

double eta_inf(const HonestModel& m) {
  return (1.0 - m.gamma_A / 2.0) * (1.0 - m.gamma_B) * math::binary_entropy(m.q) +
         m.gamma_A * m.gamma_B * math::binary_entropy(m.omega);
}

LeakEc leak_ec(double n, const HonestModel& m, double eps_EC_com, double eps_tilde) {
  if (!(eps_EC_com > 0.0 && eps_EC_com < 1.0)) throw std::domain_error("leak_ec: eps_EC_com must lie in (0,1)");
  const double base = n * eta_inf(m);
  auto bound = [&](double et) {
    const double gap = eps_EC_com - et;
    return base + 2.0 * kLog2_5 * std::sqrt(n * std::log2(2.0 / (gap * gap))) + 2.0 * std::log2(1.0 / et) + 4.0;
  };
  LeakEc out;
  if (eps_tilde > 0.0) {
    if (!(eps_tilde < eps_EC_com)) throw std::domain_error("leak_ec: need eps_tilde < eps_EC_com");
    out.eps_tilde = eps_tilde;
    out.bits = bound(eps_tilde);
    return out;
  }
  // Scan log2(eps_tilde), then refine.
  const double hi = std::log2(eps_EC_com) + std::log2(1.0 - 1e-9);
  const double lo = hi - 200.0;
  constexpr int kGrid = 400;
  auto neg = [&](double t) { return -bound(std::exp2(t)); };
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= kGrid; ++j) {
    const double v = neg(lo + (hi - lo) * j / kGrid);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  const double a = lo + (hi - lo) * std::max(best - 1, 0) / kGrid;
  const double b = lo + (hi - lo) * std::min(best + 1, kGrid) / kGrid;
  auto [t, v] = golden_max(neg, a, b);
  if (v < best_val) {
    t = lo + (hi - lo) * best / kGrid;
    v = best_val;
  }
  out.eps_tilde = std::exp2(t);
  out.bits = -v;
  return out;
}

double completeness_ea(double n, double c, double gamma_A, double gamma_B, double omega_exp) {
  const double mu = gamma_A * gamma_B * omega_exp;
  if (c >= mu) return 1.0;
  if (c < 0.0) return 0.0;
  return std::exp2(-n * math::rel_entropy_binary(c, mu));
}

double delta_for_completeness(double n, double gamma_A, double gamma_B, double omega_exp, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::domain_error("delta_for_completeness: target must lie in (0,1)");
  const double mu = gamma_A * gamma_B * omega_exp;
  if (!(mu > 0.0 && mu < 1.0)) throw std::domain_error("delta_for_completeness: need 0 < γ_A γ_B ω < 1");
  const double need = std::log2(1.0 / target);
  if (n * math::rel_entropy_binary(0.0, mu) < need) return mu;
  double lo = 0.0;  // n D < need
  double hi = mu;   // n D >= need
  for (int i = 0; i < 200 && hi - lo > 1e-16 * mu; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (n * math::rel_entropy_binary(mu - mid, mu) >= need) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double vartheta(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("vartheta: ε must lie in (0,1)");
  return 1.0 - 2.0 * std::log2(eps);
}

EatKeyLength key_length_eat_at(double n, const HonestModel& m, const EatBudget& budget, double delta,
                               DeltaNormalization norm) {
  m.validate();
  budget.validate();
  if (!(n >= 1.0)) throw std::domain_error("key_length_eat: n must be at least 1");
  const LeakEc leak = leak_ec(n, m, budget.eps_EC_com, budget.eps_tilde);
  return evaluate(n, m, budget, delta, norm, leak);
}

EatKeyLength key_length_eat(double n, const HonestModel& m, const EatBudget& budget, double delta,
                            DeltaNormalization norm) {
  m.validate();
  if (!(n >= 1.0)) throw std::domain_error("key_length_eat: n must be at least 1");
  if (!(budget.eps_snd > 2.0 * budget.eps_EC && budget.eps_snd < 1.0)) {
    throw InfeasibleError("key_length_eat: eps_snd leaves no room for secrecy after eps_EC");
  }
  if (!(budget.eps_tilde >= 0.0 && budget.eps_tilde < budget.eps_EC_com)) {
    throw std::domain_error("key_length_eat: need 0 <= eps_tilde < eps_EC_com");
  }
  const LeakEc leak = leak_ec(n, m, budget.eps_EC_com, budget.eps_tilde);

  // Coordinate descent over log10 fractions on a 16-point grid, then two
  // passes on grids narrowed to one step around the incumbent.
  constexpr int kPoints = 16;
  const std::array<double, 4> lower{-4.0, -4.0, -4.0, -4.0};
  const std::array<double, 4> upper{std::log10(0.999), std::log10(0.999), std::log10(0.499), 0.0};
  std::array<double, 4> lo = lower;
  std::array<double, 4> hi = upper;
  Split cur{{std::log10(0.5), std::log10(0.5), std::log10(0.25), 0.0}};
  EatKeyLength best = evaluate(n, m, apply_split(budget, cur), delta, norm, leak);
  for (int pass = 0; pass < 3; ++pass) {
    std::array<double, 4> step{};
    for (int k = 0; k < 4; ++k) {
      step[k] = (hi[k] - lo[k]) / (kPoints - 1);
      for (int j = 0; j < kPoints; ++j) {
        Split trial = cur;
        trial.u[k] = lo[k] + step[k] * j;
        if (!split_feasible(trial)) continue;
        const EatKeyLength r = evaluate(n, m, apply_split(budget, trial), delta, norm, leak);
        if (r.bits_raw > best.bits_raw) {
          best = r;
          cur = trial;
        }
      }
    }
    for (int k = 0; k < 4; ++k) {
      lo[k] = std::max(lower[k], cur.u[k] - step[k]);
      hi[k] = std::min(upper[k], cur.u[k] + step[k]);
    }
  }
  best.budget.validate();
  return best;
}

double asymptotic_rate_sifted(double S, double Q, double gamma_A, double gamma_B) {
  const double omega = math::chsh_to_winprob(S);
  const double g = omega <= kOmegaMin ? 0.0 : g_func(omega);
  const HonestModel m{omega, Q, gamma_A, gamma_B};
  return gamma_eff(gamma_A, gamma_B) * g - eta_inf(m) - gamma_A * gamma_B;
}

double asymptotic_rate_nosift(double S, double Q) {
  const double omega = math::chsh_to_winprob(S);
  const double g = omega <= kOmegaMin ? 0.0 : g_func(omega);
  return g - math::binary_entropy(Q);
}

}  // namespace diqkd::eat

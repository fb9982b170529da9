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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "diqkd/eat.hpp"
#include "diqkd/errors.hpp"
#include "diqkd/renyi.hpp"

namespace {

using namespace diqkd::renyi;
using diqkd::math::Distribution3;

const double kTsirelson = 2 * std::sqrt(2.0);
const double kTop = (2 + std::sqrt(2.0)) / 4;

double H_hp(double S, double alpha) {
  using F = boost::multiprecision::cpp_bin_float_50;
  const F s(S), a(alpha);
  const F r = sqrt(s * s / 4 - 1);
  const F bracket = pow((1 - r) / 2, 1 / a) + pow((1 + r) / 2, 1 / a);
  const F factor = pow(F(2), 1 - a) * pow(bracket, a);
  return static_cast<double>(log(factor) / log(F(2)) / (1 - a));
}

double kl3(const Distribution3& q, const Distribution3& p) {
  double d = 0;
  const double qs[] = {q.q0, q.q1, q.q_perp};
  const double ps[] = {p.q0, p.q1, p.q_perp};
  for (int c = 0; c < 3; ++c) {
    if (qs[c] > 0) d += qs[c] * std::log2(qs[c] / ps[c]);
  }
  return d;
}

TEST(QHonest, Examples) {
  const auto z = q_honest(0, 0, 0.8);
  EXPECT_EQ(z.q0, 0.0);
  EXPECT_EQ(z.q1, 0.0);
  EXPECT_EQ(z.q_perp, 1.0);
  const auto one = q_honest(1, 1, 1);
  EXPECT_EQ(one.q1, 1.0);
  EXPECT_EQ(one.q_perp, 0.0);
  const auto q = q_honest(0.26, 0.13, 0.8265);
  EXPECT_NEAR(q.q0, 0.0058643, 1e-6);
  EXPECT_NEAR(q.q1, 0.0279357, 1e-6);
  EXPECT_NEAR(q.q_perp, 0.9662, 1e-12);
}

TEST(PModel, AgreesWithHonest) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double ga = u(gen), gb = u(gen), w = u(gen);
    const auto p = p_model(w, ga, gb);
    const auto q = q_honest(ga, gb, w);
    EXPECT_DOUBLE_EQ(p.q0, q.q0);
    EXPECT_DOUBLE_EQ(p.q1, q.q1);
    EXPECT_DOUBLE_EQ(p.q_perp, q.q_perp);
    EXPECT_NEAR(p.q0 + p.q1 + p.q_perp, 1.0, 1e-15);
  }
  EXPECT_NEAR(p_model(0.75, 0.5, 0.4).q1, 0.75 * 0.2, 1e-15);
  EXPECT_THROW(p_model(1.1, 0.5, 0.5), std::domain_error);
}

TEST(EntropyFactor, Endpoints) {
  for (double a : {1.01, 1.2, 1.5, 2.0}) {
    EXPECT_NEAR(renyi_entropy_factor(kTsirelson, a), std::pow(2.0, 1 - a), 1e-12);
    EXPECT_NEAR(renyi_key_entropy(kTsirelson, a), 1.0, 1e-9);
    EXPECT_NEAR(renyi_entropy_factor(2.0, a), 1.0, 1e-15);
    EXPECT_EQ(renyi_key_entropy(2.0, a), 0.0);
    EXPECT_EQ(renyi_key_entropy(1.5, a), 0.0);
  }
  EXPECT_THROW(renyi_key_entropy(2.9, 1.2), std::domain_error);
  EXPECT_THROW(renyi_key_entropy(2.6, 1.0), std::domain_error);
}

TEST(EntropyFactor, HighPrecision) {
  const double H = renyi_key_entropy(2.612, 1.2);
  EXPECT_GT(H, 0.0);
  EXPECT_LT(H, 1.0);
  EXPECT_NEAR(H, H_hp(2.612, 1.2), 1e-12);
  EXPECT_NEAR(std::log2(renyi_entropy_factor(2.612, 1.2)) / (1 - 1.2), H, 1e-12);
  for (double a : {1.0 + 1e-6, 1.001, 1.05, 1.9}) {
    for (double S : {2.1, 2.5, 2.7, 2.8}) EXPECT_NEAR(renyi_key_entropy(S, a), H_hp(S, a), 1e-9) << S << " " << a;
  }
}

TEST(EntropyFactor, Monotone) {
  for (int i = 0; i < 10; ++i) {
    const double a = 1.0 + 0.1 * (i + 1);
    double prev = -1;
    for (int j = 0; j <= 10; ++j) {
      const double S = 2.0 + (kTsirelson - 2.0) * j / 10;
      const double H = renyi_key_entropy(S, a);
      EXPECT_GE(H, prev - 1e-15);
      prev = H;
    }
  }
  for (double S : {2.2, 2.5, 2.612, 2.8}) {
    double prev = 2;
    for (int i = 0; i < 10; ++i) {
      const double H = renyi_key_entropy(S, 1.0 + 0.1 * (i + 1));
      EXPECT_LE(H, prev + 1e-15);
      prev = H;
    }
  }
}

TEST(SiftWeights, Values) {
  const auto w = sift_weights(0.26, 0.13);
  EXPECT_NEAR(w.w_key, (1 - 0.13 - 0.13 * 0.87) / (1 - 0.0338), 1e-14);
  EXPECT_NEAR(w.w_key, 0.7569 / 0.9662, 1e-14);
  EXPECT_NEAR(w.w_key, 0.783378, 5e-7);
  EXPECT_NEAR(w.w_rest, 0.216622, 5e-7);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0, 0.99);
  for (int i = 0; i < 100; ++i) {
    const auto s = sift_weights(u(gen), u(gen));
    EXPECT_NEAR(s.w_key + s.w_rest, 1.0, 1e-14);
  }
  const auto zero = sift_weights(0, 0);
  EXPECT_EQ(zero.w_key, 1.0);
}

TEST(SiftedBound, Examples) {
  for (double a : {1.1, 1.5}) {
    EXPECT_NEAR(sifted_entropy_bound(a, 0, 0, 2.7), renyi_key_entropy(2.7, a), 1e-12);
    EXPECT_NEAR(sifted_entropy_bound(a, 0.26, 0.13, 2.0), 0.0, 1e-15);
    const auto w = sift_weights(0.26, 0.13);
    const double direct =
        std::log2(w.w_key * renyi_entropy_factor(2.6, a) + w.w_rest) / (1 - a);
    EXPECT_NEAR(sifted_entropy_bound(a, 0.26, 0.13, 2.6), direct, 1e-12);
  }
}

TEST(AcceptanceSet, Construction) {
  const auto q = q_honest(0.26, 0.13, 0.8265);
  const auto acc = build_acceptance_set(q, 100000, 0.005);
  EXPECT_TRUE(acc.feasible());
  EXPECT_TRUE(acc.contains(q));
  for (int c = 0; c < 3; ++c) {
    EXPECT_GT(acc.delta_low[c], 0.0);
    EXPECT_GT(acc.delta_upp[c], 0.0);
  }
  // Level 1 means no constraint on either tail, so the box collapses.
  const auto point = build_acceptance_set(q, 100000, 6.0);
  for (int c = 0; c < 3; ++c) {
    EXPECT_LE(point.delta_low[c], 1e-5);
    EXPECT_LE(point.delta_upp[c], 1e-5);
  }
}

TEST(AcceptanceSet, InverseRootScaling) {
  const auto q = q_honest(0.26, 0.13, 0.8265);
  for (std::int64_t n : {10000, 100000}) {
    const auto a = build_acceptance_set(q, n, 0.005);
    const auto b = build_acceptance_set(q, 4 * n, 0.005);
    for (int c = 0; c < 3; ++c) {
      const double lo = b.delta_low[c] / a.delta_low[c];
      const double hi = b.delta_upp[c] / a.delta_upp[c];
      EXPECT_GE(lo, 0.4) << n << " " << c;
      EXPECT_LE(lo, 0.6) << n << " " << c;
      EXPECT_GE(hi, 0.4) << n << " " << c;
      EXPECT_LE(hi, 0.6) << n << " " << c;
    }
  }
}

TEST(AcceptanceSet, HonestAbortRate) {
  const double eps = 0.05;
  const std::int64_t n = 100000;
  const auto q = q_honest(0.26, 0.13, 0.8265);
  const auto acc = build_acceptance_set(q, n, eps);
  std::mt19937_64 gen(20260101);
  int aborts = 0;
  const int runs = 300;
  for (int r = 0; r < runs; ++r) {
    const std::int64_t n1 = std::binomial_distribution<std::int64_t>(n, q.q1)(gen);
    const std::int64_t n0 = std::binomial_distribution<std::int64_t>(n - n1, q.q0 / (1 - q.q1))(gen);
    const double nd = static_cast<double>(n);
    const Distribution3 f{n0 / nd, n1 / nd, (n - n0 - n1) / nd};
    if (!acc.contains(f)) ++aborts;
  }
  EXPECT_LE(static_cast<double>(aborts) / runs, eps);
}

// Objective evaluated on a dense grid over box ∩ simplex.
double brute_inner(double alpha, double omega_sigma, double ga, double gb, const AcceptanceSet& acc) {
  const auto p = p_model(omega_sigma, ga, gb);
  const double S = 8 * omega_sigma - 4;
  const double hs = S > 2 ? sifted_entropy_bound(alpha, ga, gb, S) : 0.0;
  double best = std::numeric_limits<double>::infinity();
  const int k = 600;
  for (int i = 0; i <= k; ++i) {
    const double q0 = acc.lower(0) + (acc.upper(0) - acc.lower(0)) * i / k;
    for (int j = 0; j <= k; ++j) {
      const double q1 = acc.lower(1) + (acc.upper(1) - acc.lower(1)) * j / k;
      const double qp = 1 - q0 - q1;
      if (qp < acc.lower(2) || qp > acc.upper(2)) continue;
      const Distribution3 q{q0, q1, qp};
      best = std::min(best, kl3(q, p) / (alpha - 1) + qp * hs);
    }
  }
  return best;
}

TEST(InnerMinimum, MatchesBruteForce) {
  const auto q = q_honest(0.26, 0.13, 0.8265);
  const auto acc = build_acceptance_set(q, 100000, 0.005);
  for (double alpha : {1.001, 1.01, 1.1}) {
    for (double w : {0.70, 0.78, 0.80, 0.8265, 0.84}) {
      const auto r = inner_minimum(alpha, w, 0.26, 0.13, acc);
      const double bf = brute_inner(alpha, w, 0.26, 0.13, acc);
      EXPECT_LE(r.value, bf + 1e-9) << alpha << " " << w;
      EXPECT_GE(r.value, bf - 1e-3 * std::max(1.0, std::abs(bf))) << alpha << " " << w;
      EXPECT_TRUE(acc.contains(r.q));
    }
  }
}

TEST(HAlpha, PointBox) {
  const double w = 0.8265;
  const auto q = q_honest(0.26, 0.13, w);
  AcceptanceSet acc;
  acc.q_hon = q;
  const double alpha = 1.05;
  const auto r = inner_minimum(alpha, w, 0.26, 0.13, acc);
  EXPECT_NEAR(r.value, q.q_perp * sifted_entropy_bound(alpha, 0.26, 0.13, 8 * w - 4), 1e-12);
}

TEST(HAlpha, PerfectViolationLimit) {
  // α → 1 must be taken before γ → 0: at fixed α the divergence cost of a
  // classical attack scales as γ² / (α - 1) and vanishes with γ.
  const double g = 1e-3;
  AcceptanceSet acc;
  acc.q_hon = q_honest(g, g, kTop);
  double prev = 0;
  for (double am1 : {1e-8, 1e-10, 1e-12}) {
    const double h = h_alpha(1.0 + am1, 256, g, g, acc).value;
    EXPECT_GT(h, prev);
    EXPECT_LE(h, 1.0);
    prev = h;
  }
  EXPECT_GT(prev, 0.995);
}

TEST(HAlpha, Monotone) {
  const auto q = q_honest(0.26, 0.13, 0.8265);
  const auto acc = build_acceptance_set(q, 1208000, 0.005);
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i) {
    const double alpha = 1.0 + std::pow(10.0, -5.0 + 0.5 * i);
    const double h = h_alpha(alpha, 256, 0.26, 0.13, acc).value;
    EXPECT_LE(h, prev + 1e-9) << alpha;
    prev = h;
  }
  prev = -1;
  for (int i = 0; i < 10; ++i) {
    AcceptanceSet s = acc;
    const double scale = 1.0 - 0.1 * i;
    for (int c = 0; c < 3; ++c) {
      s.delta_low[c] *= scale;
      s.delta_upp[c] *= scale;
    }
    const double h = h_alpha(1.001, 256, 0.26, 0.13, s).value;
    EXPECT_GE(h, prev - 1e-9) << scale;
    prev = h;
  }
}

TEST(HAlpha, EmptyBoxThrows) {
  AcceptanceSet acc;
  acc.q_hon = {0.2, 0.2, 0.2};
  EXPECT_THROW(h_alpha(1.1, 64, 0.26, 0.13, acc), diqkd::InfeasibleError);
}

struct OperatingPoint {
  diqkd::eat::HonestModel m = diqkd::eat::HonestModel::from_chsh(2.612, 0.0285, 0.26, 0.13);
  RenyiConfig cfg;
  double leak(double n) const { return diqkd::eat::leak_ec(n, m, 0.005).bits; }
  AcceptanceSet acc(double n) const {
    return build_acceptance_set(q_honest(m.gamma_A, m.gamma_B, m.omega), static_cast<std::int64_t>(n),
                                cfg.eps_com_AT);
  }
  RenyiKeyLength renyi(double n) const { return key_length_renyi(n, m, cfg, acc(n), leak(n)); }
  double eat_rate(double n) const {
    const double d = diqkd::eat::delta_for_completeness(n, m.gamma_A, m.gamma_B, m.omega, 0.01);
    return diqkd::eat::key_length_eat(n, m, diqkd::eat::EatBudget{}, d).rate;
  }
};

TEST(KeyLength, SmallBlockIsEmpty) {
  OperatingPoint s;
  const auto r = s.renyi(1000);
  EXPECT_LE(r.bits_raw, 0.0);
  EXPECT_EQ(r.bits, 0.0);
}

TEST(KeyLength, BeatsEatAtExperimentSize) {
  OperatingPoint s;
  const double n = 1208000;
  const auto r = s.renyi(n);
  EXPECT_GT(r.rate, s.eat_rate(n));
  EXPECT_GT(r.alpha, 1.0);
  EXPECT_LE(r.alpha, 2.0);
}

TEST(KeyLength, BelowAsymptote) {
  OperatingPoint s;
  const double asym = diqkd::eat::asymptotic_rate_sifted(2.612, 0.0285, 0.26, 0.13);
  for (double n : {1e4, 1e5, 1e6, 1e7, 1e8, 1e9}) EXPECT_LT(s.renyi(n).rate, asym) << n;
}

TEST(KeyLength, FixedAlphaFormula) {
  OperatingPoint s;
  const double n = 1208000;
  const auto acc = s.acc(n);
  const double alpha = 1.0005;
  const auto r = key_length_renyi_at(alpha, n, s.m, s.cfg, acc, s.leak(n));
  const double h = h_alpha(alpha, s.cfg.sigma_grid, 0.26, 0.13, acc).value;
  const double expect = n * h - n * (0.26 * 0.13 + acc.delta_low[2]) - s.leak(n) - 64 -
                        alpha / (alpha - 1) * std::log2(1 / s.cfg.eps_sec) + 2;
  EXPECT_NEAR(r.bits_raw, expect, 1e-6 * std::abs(expect));
}

}  // namespace

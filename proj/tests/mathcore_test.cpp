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

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "diqkd/mathcore.hpp"

namespace {

using namespace diqkd::math;
using Big = boost::multiprecision::cpp_bin_float_50;

// log2 P[X >= k] by direct summation of every pmf term at 50 digits.
double oracle_log2_tail(std::int64_t N, std::int64_t k, double p_in) {
  const Big p(p_in);
  const Big q = Big(1) - p;
  Big term = pow(q, N);
  Big tail = 0, rest = 0;
  for (std::int64_t j = 0; j <= N; ++j) {
    (j >= k ? tail : rest) += term;
    if (j < N) term = term * Big(N - j) / Big(j + 1) * p / q;
  }
  if (rest >= Big(0.5)) return static_cast<double>(log2(tail));
  // Tail near 1: log(1 - rest) as a series keeps the tiny logarithm exact.
  Big ln = 0, power = rest;
  for (int i = 1; power / i > Big(1e-60) * rest; ++i, power *= rest) ln -= power / i;
  return static_cast<double>(ln / log(Big(2)));
}

TEST(LogNumber, ZeroIsExact) {
  EXPECT_TRUE(LogNumber::zero().is_zero());
  EXPECT_TRUE((LogNumber::zero() * LogNumber::from_value(3.0)).is_zero());
  EXPECT_EQ((LogNumber::zero() + LogNumber::from_value(3.0)).value(), 3.0);
  EXPECT_EQ(LogNumber::zero().log2_value(), -INFINITY);
  EXPECT_THROW(LogNumber::from_value(-1.0), std::domain_error);
}

TEST(LogNumber, RoundTripsFarBelowDoubleRange) {
  const double log2_tiny = -400.0 / std::log10(2.0);
  const auto x = LogNumber::from_log2(log2_tiny);
  EXPECT_FALSE(x.is_zero());
  EXPECT_NEAR(x.log10_value(), -400.0, 1e-12);
  EXPECT_EQ(x.value(), 0.0);
}

TEST(LogNumber, ProductAddsLogs) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2000.0, 2000.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(gen);
    const double b = u(gen);
    const double got = (LogNumber::from_log2(a) * LogNumber::from_log2(b)).log2_value();
    EXPECT_LE(std::abs(got - (a + b)), 1e-12 * std::max(1.0, std::abs(a + b)));
  }
  const auto s = LogNumber::from_value(0.25) + LogNumber::from_value(0.5);
  EXPECT_NEAR(s.value(), 0.75, 1e-15);
  EXPECT_TRUE(LogNumber::from_value(0.25) < LogNumber::from_value(0.5));
}

TEST(Distribution3, Validity) {
  EXPECT_TRUE((Distribution3{0.1, 0.2, 0.7}.is_valid()));
  EXPECT_FALSE((Distribution3{0.1, 0.2, 0.8}.is_valid()));
  EXPECT_FALSE((Distribution3{-0.1, 0.4, 0.7}.is_valid()));
}

TEST(BinaryEntropy, Values) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  // -q log2 q - (1-q) log2(1-q) at q = 0.0285, evaluated separately.
  const double q = 0.0285;
  const double ref = -q * std::log(q) / std::log(2.0) - (1 - q) * std::log1p(-q) / std::log(2.0);
  EXPECT_NEAR(binary_entropy(q), ref, 1e-15);
  EXPECT_NEAR(binary_entropy(q), 0.1868127, 5e-7);
  EXPECT_THROW(binary_entropy(1.5), std::domain_error);
}

TEST(BinaryEntropy, Symmetric) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(gen);
    EXPECT_NEAR(binary_entropy(p), binary_entropy(1.0 - p), 1e-13);
  }
}

TEST(RelEntropy, Values) {
  EXPECT_EQ(rel_entropy_binary(0.75, 0.75), 0.0);
  EXPECT_DOUBLE_EQ(rel_entropy_binary(1.0, 0.5), 1.0);
  const double ref = 0.9 * std::log2(0.9 / 0.75) + 0.1 * std::log2(0.1 / 0.25);
  EXPECT_NEAR(rel_entropy_binary(0.9, 0.75), ref, 1e-15);
  EXPECT_NEAR(rel_entropy_binary(0.9, 0.75), 0.104538, 5e-7);
  EXPECT_EQ(rel_entropy_binary(0.5, 0.0), INFINITY);
  EXPECT_EQ(rel_entropy_binary(0.5, 1.0), INFINITY);
}

TEST(KlDivergence3, Values) {
  EXPECT_EQ(kl_divergence3({0.1, 0.2, 0.7}, {0.1, 0.2, 0.7}), 0.0);
  EXPECT_DOUBLE_EQ(kl_divergence3({1, 0, 0}, {0.5, 0.25, 0.25}), 1.0);
  const double ref = 0.2 * std::log2(2.0) + 0.5 * std::log2(5.0 / 6.0);
  EXPECT_NEAR(kl_divergence3({0.2, 0.3, 0.5}, {0.1, 0.3, 0.6}), ref, 1e-15);
  EXPECT_NEAR(ref, 0.068483, 5e-7);
  EXPECT_EQ(kl_divergence3({0.5, 0.5, 0}, {1, 0, 0}), INFINITY);
}

TEST(KlDivergence3, NonnegativeAndZeroOnlyWhenEqual) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  auto draw = [&] {
    const double a = u(gen), b = u(gen), c = u(gen);
    const double s = a + b + c;
    return Distribution3{a / s, b / s, 1.0 - a / s - b / s};
  };
  for (int i = 0; i < 500; ++i) {
    const auto q = draw();
    const auto p = draw();
    EXPECT_GT(kl_divergence3(q, p), 0.0);
    EXPECT_EQ(kl_divergence3(q, q), 0.0);
  }
}

TEST(BinomialTail, SmallCases) {
  EXPECT_DOUBLE_EQ(binomial_tail(1, 1, 0.75).value(), 0.75);
  EXPECT_DOUBLE_EQ(binomial_tail(2, 2, 0.75).value(), 0.5625);
  EXPECT_EQ(binomial_tail(1000, 0, 0.3).log2_value(), 0.0);
  EXPECT_NEAR(binomial_tail(1000, 1000, 0.3).log2_value(), 1000 * std::log2(0.3), 1e-10);
  EXPECT_THROW(binomial_tail(10, 11, 0.5), std::domain_error);
}

TEST(BinomialTail, MatchesHighPrecisionOracle) {
  std::mt19937_64 gen(2026);
  std::uniform_int_distribution<std::int64_t> nd(1, 10000);
  std::uniform_real_distribution<double> pd(0.02, 0.98);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::int64_t N = nd(gen);
    const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, N)(gen);
    const double p = pd(gen);
    const double want = oracle_log2_tail(N, k, p);
    const double got = binomial_tail(N, k, p).log2_value();
    if (want == 0.0) {
      EXPECT_EQ(got, 0.0);
      continue;
    }
    const double rel = std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
    EXPECT_LE(rel, 1e-9) << "N=" << N << " k=" << k << " p=" << p;
  }
  RecordProperty("worst_relative_log_error", std::to_string(worst));
}

TEST(BinomialTail, FarTailAgainstOracle) {
  const double want = oracle_log2_tail(39645, 32767, 0.75);
  const double got = binomial_tail(39645, 32767, 0.75).log2_value();
  EXPECT_LE(std::abs(got - want) / std::abs(want), 1e-12);
  EXPECT_LT(binomial_tail(39645, 32767, 0.75).log10_value(), -290.0);
}

TEST(BinomialRange, ComplementPathKeepsPrecision) {
  // P[X <= 99] for Binomial(100, 0.2) is 1 - 0.2^100.
  const auto r = binomial_range(100, 0, 99, 0.2);
  EXPECT_NEAR(r.log2_value(), std::log1p(-std::pow(0.2, 100)) / std::log(2.0), 1e-80);
  EXPECT_TRUE(binomial_range(10, 5, 4, 0.5).is_zero());
  EXPECT_EQ(binomial_range(10, 0, 3, 0.0).value(), 1.0);
  EXPECT_TRUE(binomial_range(10, 1, 3, 0.0).is_zero());
}

TEST(BinomialBox, Examples) {
  const auto wide = binomial_box(100, 0.3, 1.0);
  EXPECT_EQ(wide.delta_low, 0.0);
  EXPECT_EQ(wide.delta_upp, 0.0);
  const auto one = binomial_box(1, 0.5, 0.4);
  EXPECT_DOUBLE_EQ(one.delta_low, 0.5);
  EXPECT_DOUBLE_EQ(one.delta_upp, 0.5);
}

// Thresholds satisfy their tail inequalities and moving them one count
// inward breaks them.
void check_box(std::int64_t N, double p, double eps) {
  const auto box = binomial_box(N, p, eps);
  const double n = static_cast<double>(N);
  const auto lo = static_cast<std::int64_t>(std::llround(n * (p - box.delta_low)));
  const auto hi = static_cast<std::int64_t>(std::llround(n * (p + box.delta_upp)));
  if (box.delta_low > 0) {
    EXPECT_NEAR(n * (p - box.delta_low), static_cast<double>(lo), 1e-6);
  }
  if (box.delta_upp > 0) {
    EXPECT_NEAR(n * (p + box.delta_upp), static_cast<double>(hi), 1e-6);
  }
  const double le = std::log2(eps);
  EXPECT_LE(binomial_lower(N, lo, p).log2_value(), le);
  EXPECT_LE(binomial_range(N, hi + 1, N, p).log2_value(), le);
  if (box.delta_low > 0) {
    EXPECT_GT(binomial_lower(N, lo + 1, p).log2_value(), le);
  }
  if (box.delta_upp > 0) {
    EXPECT_GT(binomial_range(N, hi, N, p).log2_value(), le);
  }
}

TEST(BinomialBox, DefiningInequalities) {
  check_box(10000, 0.0338 * 0.8265, 0.01 / 6);
  check_box(100000, 0.0058, 0.005 / 6);
  check_box(1208000, 0.96620, 0.005 / 6);
  check_box(50, 0.5, 0.1);
}

TEST(BinomialBox, AgreesWithOracleCdf) {
  const std::int64_t N = 10000;
  const double p = 0.0338 * 0.8265;
  const double eps = 0.01 / 6;
  const auto box = binomial_box(N, p, eps);
  const auto lo = std::llround(N * (p - box.delta_low));
  const auto hi = std::llround(N * (p + box.delta_upp));
  // P[X < lo] = 1 - P[X >= lo].
  auto lower = [&](std::int64_t k) { return 1.0 - std::exp2(oracle_log2_tail(N, k, p)); };
  EXPECT_LE(lower(lo), eps);
  EXPECT_GT(lower(lo + 1), eps);
  EXPECT_LE(std::exp2(oracle_log2_tail(N, hi + 1, p)), eps);
  EXPECT_GT(std::exp2(oracle_log2_tail(N, hi, p)), eps);
}

TEST(Chsh, WinProbability) {
  EXPECT_DOUBLE_EQ(chsh_to_winprob(2.0), 0.75);
  EXPECT_NEAR(chsh_to_winprob(2.0 * std::sqrt(2.0)), (2.0 + std::sqrt(2.0)) / 4.0, 1e-15);
  EXPECT_NEAR(chsh_to_winprob(2.612), 0.8265, 1e-15);
  EXPECT_NEAR(winprob_to_chsh(chsh_to_winprob(2.5)), 2.5, 1e-15);
}

}  // namespace

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

#include "diqkd/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace diqkd::math {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0,1], got " + std::to_string(p));
  }
}

// x log2(x / y) with 0 log 0 = 0.
double xlogx_over_y(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return kInf;
  return x * std::log2(x / y);
}

// ln(n!) - ln(sqrt(2 pi n) (n/e)^n), the Stirling remainder.
double stirling_error(double n) {
  constexpr double kS0 = 1.0 / 12.0;
  constexpr double kS1 = 1.0 / 360.0;
  constexpr double kS2 = 1.0 / 1260.0;
  constexpr double kS3 = 1.0 / 1680.0;
  constexpr double kS4 = 1.0 / 1188.0;
  constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;
  if (n <= 15.0) {
    if (n == 0.0) return kLnSqrt2Pi;
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLnSqrt2Pi;
  }
  const double nn = n * n;
  if (n > 500.0) return (kS0 - kS1 / nn) / n;
  if (n > 80.0) return (kS0 - (kS1 - kS2 / nn) / nn) / n;
  if (n > 35.0) return (kS0 - (kS1 - (kS2 - kS3 / nn) / nn) / nn) / n;
  return (kS0 - (kS1 - (kS2 - (kS3 - kS4 / nn) / nn) / nn) / nn) / n;
}

// x ln(x/m) + m - x without cancellation near x = m.
double deviance_term(double x, double m) {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    const double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

// log2 of the Binomial(n, p) pmf at k, accurate to a few ulps in the pmf
// itself (saddle-point form).
double log2_pmf(std::int64_t n_count, std::int64_t k_count, double p) {
  const double n = static_cast<double>(n_count);
  const double k = static_cast<double>(k_count);
  const double q = 1.0 - p;
  if (k_count == 0) return n * std::log1p(-p) / kLn2;
  if (k_count == n_count) return n * std::log2(p);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double ln = stirling_error(n) - stirling_error(k) - stirling_error(n - k) -
                    deviance_term(k, n * p) - deviance_term(n - k, n * q) +
                    0.5 * std::log(n / (kTwoPi * k * (n - k)));
  return ln / kLn2;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

LogNumber LogNumber::from_log2(double log2_value) {
  LogNumber out;
  if (log2_value == -kInf) return out;
  if (std::isnan(log2_value)) throw std::domain_error("LogNumber: NaN exponent");
  out.log2_ = log2_value;
  out.is_zero_ = false;
  return out;
}

LogNumber LogNumber::from_value(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::domain_error("LogNumber: value must be finite and nonnegative");
  }
  if (value == 0.0) return zero();
  return from_log2(std::log2(value));
}

double LogNumber::log2_value() const { return is_zero_ ? -kInf : log2_; }

double LogNumber::log10_value() const {
  return is_zero_ ? -kInf : log2_ * 0.30102999566398119521;
}

double LogNumber::value() const { return is_zero_ ? 0.0 : std::exp2(log2_); }

LogNumber operator*(LogNumber a, LogNumber b) {
  if (a.is_zero_ || b.is_zero_) return LogNumber::zero();
  return LogNumber::from_log2(a.log2_ + b.log2_);
}

LogNumber operator/(LogNumber a, LogNumber b) {
  if (b.is_zero_) throw std::domain_error("LogNumber: division by zero");
  if (a.is_zero_) return LogNumber::zero();
  return LogNumber::from_log2(a.log2_ - b.log2_);
}

LogNumber operator+(LogNumber a, LogNumber b) {
  if (a.is_zero_) return b;
  if (b.is_zero_) return a;
  const double hi = std::max(a.log2_, b.log2_);
  const double lo = std::min(a.log2_, b.log2_);
  return LogNumber::from_log2(hi + std::log1p(std::exp2(lo - hi)) / kLn2);
}

bool operator<(LogNumber a, LogNumber b) {
  if (a.is_zero_) return !b.is_zero_;
  if (b.is_zero_) return false;
  return a.log2_ < b.log2_;
}

bool Distribution3::is_valid(double tol) const {
  for (double v : {q0, q1, q_perp}) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return std::abs(q0 + q1 + q_perp - 1.0) <= tol;
}

double binary_entropy(double p) {
  check_probability(p, "binary_entropy argument");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double rel_entropy_binary(double p, double q) {
  check_probability(p, "rel_entropy_binary p");
  check_probability(q, "rel_entropy_binary q");
  return xlogx_over_y(p, q) + xlogx_over_y(1.0 - p, 1.0 - q);
}

double kl_divergence3(const Distribution3& q, const Distribution3& p) {
  double d = 0.0;
  for (int c = 0; c < 3; ++c) {
    check_probability(q[c], "kl_divergence3 q entry");
    check_probability(p[c], "kl_divergence3 p entry");
    d += xlogx_over_y(q[c], p[c]);
  }
  // Rounding can leave tiny negative values for q == p.
  return std::max(d, 0.0);
}

namespace {

// log2 P[lo <= X <= hi] for 0 <= lo <= hi <= N and 0 < p < 1.
double log2_range_sum(std::int64_t N, std::int64_t lo, std::int64_t hi, double p) {
  // The pmf is unimodal, so the largest term in [lo, hi] sits at the clamped
  // mode. Sum outward from it with ratios relative to that term.
  const auto mode = static_cast<std::int64_t>(std::floor((static_cast<double>(N) + 1.0) * p));
  const std::int64_t j0 = std::clamp(std::min(mode, N), lo, hi);
  const double log2_t0 = log2_pmf(N, j0, p);

  const double odds = p / (1.0 - p);
  constexpr double kStop = 1e-20;
  CompensatedSum acc;
  acc.add(1.0);

  double rel = 1.0;
  for (std::int64_t j = j0; j < hi; ++j) {
    rel *= static_cast<double>(N - j) / static_cast<double>(j + 1) * odds;
    acc.add(rel);
    if (rel < kStop * acc.value()) break;
  }
  rel = 1.0;
  for (std::int64_t j = j0; j > lo; --j) {
    rel *= static_cast<double>(j) / static_cast<double>(N - j + 1) / odds;
    acc.add(rel);
    if (rel < kStop * acc.value()) break;
  }
  return std::min(log2_t0 + std::log2(acc.value()), 0.0);
}

}  // namespace

LogNumber binomial_range(std::int64_t N, std::int64_t lo, std::int64_t hi, double p) {
  if (N < 0) throw std::domain_error("binomial_range: N must be nonnegative");
  check_probability(p, "binomial_range p");
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min(hi, N);
  if (lo > hi) return LogNumber::zero();

  // Degenerate success probabilities put all mass on a single count.
  if (p == 0.0) return lo == 0 ? LogNumber::one() : LogNumber::zero();
  if (p == 1.0) return hi == N ? LogNumber::one() : LogNumber::zero();
  if (lo == 0 && hi == N) return LogNumber::one();

  const double direct = log2_range_sum(N, lo, hi, p);
  // A one-sided range holding more than half the mass is 1 - (other side);
  // log1p keeps relative precision in the small logarithm.
  if (direct > -1.0 && (lo == 0 || hi == N)) {
    const double other = lo == 0 ? log2_range_sum(N, hi + 1, N, p) : log2_range_sum(N, 0, lo - 1, p);
    return LogNumber::from_log2(std::log1p(-std::exp2(other)) / kLn2);
  }
  return LogNumber::from_log2(direct);
}

LogNumber binomial_tail(std::int64_t N, std::int64_t k, double p0) {
  if (N < 0 || k < 0 || k > N) {
    throw std::domain_error("binomial_tail: require 0 <= k <= N");
  }
  return binomial_range(N, k, N, p0);
}

BinomialBox binomial_box(std::int64_t N, double p, double eps) {
  if (N < 1) throw std::domain_error("binomial_box: N must be positive");
  check_probability(p, "binomial_box p");
  if (!(eps > 0.0)) throw std::domain_error("binomial_box: eps must be positive");
  BinomialBox box;
  if (eps >= 1.0) return box;

  const LogNumber level = LogNumber::from_value(eps);
  const double n = static_cast<double>(N);

  // Largest k with P[X < k] <= eps. P[X < 0] = 0 so k = 0 always qualifies.
  std::int64_t good = 0;
  std::int64_t bad = N + 1;
  while (bad - good > 1) {
    const std::int64_t mid = good + (bad - good) / 2;
    if (binomial_lower(N, mid, p) <= level) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  box.delta_low = std::max(0.0, p - static_cast<double>(good) / n);

  // Smallest k with P[X > k] <= eps. P[X > N] = 0.
  std::int64_t fail = -1;
  std::int64_t pass = N;
  while (pass - fail > 1) {
    const std::int64_t mid = fail + (pass - fail) / 2;
    if (binomial_range(N, mid + 1, N, p) <= level) {
      pass = mid;
    } else {
      fail = mid;
    }
  }
  box.delta_upp = std::max(0.0, static_cast<double>(pass) / n - p);
  return box;
}

}  // namespace diqkd::math

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

namespace diqkd::math {

/// A nonnegative quantity stored as its base-2 logarithm.
///
/// Exact zero is a separate flag so that products and sums of zero stay exact
/// and p-values far below the double range (1e-316 and smaller) keep full
/// relative precision.
class LogNumber {
 public:
  constexpr LogNumber() = default;

  static constexpr LogNumber zero() { return LogNumber{}; }
  static LogNumber one() { return from_log2(0.0); }
  static LogNumber from_log2(double log2_value);
  /// Throws std::domain_error for negative or non-finite input.
  static LogNumber from_value(double value);

  bool is_zero() const { return is_zero_; }
  /// -inf for exact zero.
  double log2_value() const;
  double log10_value() const;
  /// Underflows to 0.0 below the double range.
  double value() const;

  friend LogNumber operator*(LogNumber a, LogNumber b);
  friend LogNumber operator/(LogNumber a, LogNumber b);
  friend LogNumber operator+(LogNumber a, LogNumber b);
  friend bool operator<(LogNumber a, LogNumber b);
  friend bool operator<=(LogNumber a, LogNumber b) { return !(b < a); }

 private:
  double log2_ = 0.0;
  bool is_zero_ = true;
};

/// Probabilities over test outcomes {0, 1, ⊥}.
struct Distribution3 {
  double q0 = 0.0;
  double q1 = 0.0;
  double q_perp = 1.0;

  double operator[](int c) const { return c == 0 ? q0 : (c == 1 ? q1 : q_perp); }
  double& operator[](int c) { return c == 0 ? q0 : (c == 1 ? q1 : q_perp); }
  /// Entries in [0,1] and summing to 1 within `tol`.
  bool is_valid(double tol = 1e-12) const;
};

double binary_entropy(double p);

/// KL divergence D(p||q) of Bernoulli distributions in bits; +inf when the
/// support condition fails.
double rel_entropy_binary(double p, double q);

/// Σ_c q(c) log2(q(c)/p(c)); +inf when supp(q) ⊄ supp(p).
double kl_divergence3(const Distribution3& q, const Distribution3& p);

/// P[lo <= X <= hi] for X ~ Binomial(N, p), evaluated in log space.
LogNumber binomial_range(std::int64_t N, std::int64_t lo, std::int64_t hi, double p);

/// P[X >= k] for X ~ Binomial(N, p0).
LogNumber binomial_tail(std::int64_t N, std::int64_t k, double p0);

/// P[X < k].
inline LogNumber binomial_lower(std::int64_t N, std::int64_t k, double p) {
  return binomial_range(N, 0, k - 1, p);
}

struct BinomialBox {
  double delta_low = 0.0;
  double delta_upp = 0.0;
};

/// Smallest δ_low, δ_upp >= 0 with P[X/N < p - δ_low] <= eps and
/// P[X/N > p + δ_upp] <= eps, obtained by inverting the exact binomial CDF.
/// The thresholds p - δ_low and p + δ_upp always land on attainable
/// frequencies k/N.
BinomialBox binomial_box(std::int64_t N, double p, double eps);

inline double chsh_to_winprob(double S) { return 0.5 + S / 8.0; }
inline double winprob_to_chsh(double omega) { return 8.0 * omega - 4.0; }

}  // namespace diqkd::math

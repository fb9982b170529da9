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
#include <iosfwd>
#include <string>
#include <vector>

#include "diqkd/quantum.hpp"

namespace diqkd::protocol {

/// Test outcome for rounds that are not Bell-test rounds.
inline constexpr int kBot = 2;

struct ProtocolParams {
  std::int64_t n = 1;
  double gamma_A = 0.26;
  double gamma_B = 0.13;
  double omega_exp = 0.8265;
  double delta = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// P(a, b | x, y) for x ∈ {0,1}, y ∈ {0,1,2}; entry [x][y][2a + b].
struct Behavior {
  std::array<std::array<std::array<double, 4>, 3>, 2> p{};

  double prob(int a, int b, int x, int y) const { return p[x][y][2 * a + b]; }
  /// Throws unless every conditional distribution is normalized within 1e-12
  /// and nonnegative.
  void validate() const;
  /// Largest disagreement between marginals that should not depend on the
  /// other party's setting.
  double signaling_gap() const;
};

/// x selects Z or X; y = 0, 1 select the diagonals and y = 2 repeats the
/// key basis Z.
struct MeasurementSettings {
  std::array<quantum::BlochVector<double>, 2> a;
  std::array<quantum::BlochVector<double>, 3> b;

  static MeasurementSettings standard();
};

struct RoundRecord {
  std::uint8_t s = 1;
  std::uint8_t t = 1;
  std::uint8_t x = 0;
  std::uint8_t y = 2;
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint8_t c = kBot;

  bool operator==(const RoundRecord&) const = default;
};

struct Transcript {
  ProtocolParams params;
  std::vector<RoundRecord> rounds;
  std::string rng = "philox4x32-10";
  std::uint64_t rng_draws = 0;
};

/// 1 iff a ⊕ b = x ∧ y; y = 2 throws.
int payoff(int a, int b, int x, int y);

/// Born-rule table with outcome +1 mapped to bit 0. flip_b selects the frame
/// in which key outcomes agree.
Behavior behavior_from_state(const quantum::TwoQubitState<double>& rho,
                             const MeasurementSettings& settings, double readout_flip,
                             bool flip_b = true);

/// n i.i.d. rounds. Round i depends only on (seed, i), so any split of the
/// rounds across workers gives the same transcript.
Transcript generate_transcript(const Behavior& behavior, const ProtocolParams& params,
                               int workers = 1);

/// Zeroes a and b on (s,t) = (1,0) and on (s,t,x,y) = (0,1,1,2).
Transcript sift(const Transcript& tr);

/// Sum of test-round payoffs divided by n.
double test_statistic(const Transcript& tr);

/// beta ≥ γ_A γ_B ω_exp - δ.
bool accept(double beta, const ProtocolParams& params);

/// Counts needed for the estimates; merges are associative.
struct Tally {
  std::array<std::array<std::int64_t, 4>, 4> test{};  // [2x + y][2a + b], test rounds only
  std::int64_t key_rounds = 0;
  std::int64_t key_errors = 0;
  std::array<std::int64_t, 3> c_counts{};
  std::int64_t rounds = 0;

  void add(const RoundRecord& r);
  Tally& merge(const Tally& other);
};

Tally tally(const Transcript& tr);

struct Estimate {
  double S_hat = 0.0;
  double S_err = 0.0;
  double Q_hat = 0.0;
  double Q_err = 0.0;
  std::array<std::int64_t, 3> c_counts{};
  /// Some cell had fewer than two rounds; the affected quantities are zero.
  bool flagged = false;
};

Estimate estimate(const Tally& t);
Estimate estimate(const Transcript& tr);

/// Header lines echoing the parameters, then one "s,t,x,y,a,b,c" line per
/// round with ⊥ written as 2.
void write_transcript(std::ostream& out, const Transcript& tr);
Transcript read_transcript(std::istream& in);

}  // namespace diqkd::protocol

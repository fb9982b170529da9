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
#include <sstream>

#include <gtest/gtest.h>

#include "diqkd/eat.hpp"
#include "diqkd/protocol.hpp"
#include "diqkd/quantum.hpp"

namespace {

using namespace diqkd::protocol;
namespace q = diqkd::quantum;

Behavior behavior_for(double v_z, double v_x) {
  const auto rho = q::build_heralded_state<double>(q::calibrate_noise(v_z, v_x));
  return behavior_from_state(rho, MeasurementSettings::standard(), 0.0, true);
}

Behavior deterministic_zero() {
  Behavior b;
  for (auto& px : b.p) {
    for (auto& pxy : px) pxy = {1.0, 0.0, 0.0, 0.0};
  }
  return b;
}

double win_probability(const Behavior& b) {
  double w = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int bb = 0; bb < 2; ++bb) w += payoff(a, bb, x, y) * b.prob(a, bb, x, y);
      }
    }
  }
  return w / 4;
}

ProtocolParams params(std::int64_t n, std::uint64_t seed) {
  ProtocolParams p;
  p.n = n;
  p.seed = seed;
  return p;
}

TEST(Params, Validation) {
  ProtocolParams p;
  EXPECT_NO_THROW(p.validate());
  p.gamma_A = 0.0;
  EXPECT_THROW(p.validate(), std::domain_error);
  p = ProtocolParams{};
  p.omega_exp = 0.75;
  EXPECT_THROW(p.validate(), std::domain_error);
  p = ProtocolParams{};
  p.delta = -1e-3;
  EXPECT_THROW(p.validate(), std::domain_error);
  p = ProtocolParams{};
  p.n = 0;
  EXPECT_THROW(p.validate(), std::domain_error);
}

TEST(Payoff, Table) {
  EXPECT_EQ(payoff(0, 0, 0, 0), 1);
  EXPECT_EQ(payoff(0, 1, 1, 1), 1);
  EXPECT_EQ(payoff(1, 1, 1, 1), 0);
  EXPECT_THROW(payoff(0, 0, 0, 2), std::invalid_argument);
}

TEST(Behavior, FromStates) {
  const double tsirelson = (2 + std::sqrt(2.0)) / 4;
  EXPECT_NEAR(win_probability(behavior_for(1.0, 1.0)), tsirelson, 1e-12);
  const auto mixed =
      behavior_from_state(q::TwoQubitState<double>::maximally_mixed(), MeasurementSettings::standard(), 0.0);
  for (const auto& px : mixed.p) {
    for (const auto& pxy : px) {
      for (double v : pxy) EXPECT_NEAR(v, 0.25, 1e-15);
    }
  }
  const auto cal = behavior_for(0.943, 0.924);
  EXPECT_NEAR(win_probability(cal), 0.5 + std::sqrt(2.0) * (0.943 + 0.924) / 8, 1e-12);
  EXPECT_NEAR(win_probability(cal), 0.8300, 5e-5);
  EXPECT_NEAR(cal.prob(0, 1, 0, 2) + cal.prob(1, 0, 0, 2), 0.0285, 1e-12);
  EXPECT_NO_THROW(cal.validate());
  EXPECT_LE(cal.signaling_gap(), 1e-9);
}

TEST(Behavior, RejectsUnnormalized) {
  Behavior b = deterministic_zero();
  b.p[1][2][0] = 0.9;
  EXPECT_THROW(b.validate(), std::domain_error);
}

TEST(Transcript, DeterministicBehavior) {
  const auto tr = generate_transcript(deterministic_zero(), params(10, 1));
  ASSERT_EQ(tr.rounds.size(), 10u);
  for (const auto& r : tr.rounds) {
    EXPECT_EQ(r.a, 0);
    EXPECT_EQ(r.b, 0);
    if (r.c != kBot) {
      EXPECT_EQ(r.c, payoff(0, 0, r.x, r.y));
    }
  }
}

TEST(Transcript, RecordInvariants) {
  const auto tr = generate_transcript(behavior_for(0.943, 0.924), params(200000, 99));
  ASSERT_EQ(tr.rounds.size(), 200000u);
  for (const auto& r : tr.rounds) {
    if (r.s == 1) {
      ASSERT_EQ(r.x, 0);
    }
    if (r.t == 1) {
      ASSERT_EQ(r.y, 2);
    }
    const bool test = r.s == 0 && r.t == 0;
    ASSERT_EQ(r.c == kBot, !test);
    if (test) {
      ASSERT_EQ(r.c, payoff(r.a, r.b, r.x, r.y));
    }
  }
}

TEST(Transcript, SameSeedSameTranscript) {
  const auto beh = behavior_for(0.943, 0.924);
  const auto a = generate_transcript(beh, params(50000, 5));
  const auto b = generate_transcript(beh, params(50000, 5));
  const auto c = generate_transcript(beh, params(50000, 6));
  EXPECT_EQ(a.rounds, b.rounds);
  EXPECT_NE(a.rounds, c.rounds);
}

TEST(Transcript, ParallelMatchesSerial) {
  const auto beh = behavior_for(0.943, 0.924);
  const auto serial = generate_transcript(beh, params(100003, 77), 1);
  for (int w : {2, 3, 8}) EXPECT_EQ(generate_transcript(beh, params(100003, 77), w).rounds, serial.rounds);
}

TEST(Transcript, TestRoundFraction) {
  const std::int64_t n = 1000000;
  const auto tr = generate_transcript(behavior_for(0.943, 0.924), params(n, 3));
  const double gg = 0.26 * 0.13;
  std::int64_t tests = 0;
  for (const auto& r : tr.rounds) tests += r.c != kBot;
  const double sigma = std::sqrt(n * gg * (1 - gg)) / n;
  EXPECT_NEAR(static_cast<double>(tests) / n, gg, 3 * sigma);
}

TEST(Sift, Clauses) {
  Transcript tr;
  tr.rounds = {{1, 0, 0, 0, 1, 1, kBot}, {0, 1, 1, 2, 1, 0, kBot}, {0, 1, 0, 2, 1, 0, kBot}};
  const auto s = sift(tr);
  EXPECT_EQ(s.rounds[0].a, 0);
  EXPECT_EQ(s.rounds[0].b, 0);
  EXPECT_EQ(s.rounds[1].a, 0);
  EXPECT_EQ(s.rounds[1].b, 0);
  EXPECT_EQ(s.rounds[2], tr.rounds[2]);
}

TEST(Sift, SurvivingFractionIsGammaEff) {
  const std::int64_t n = 1000000;
  const auto tr = generate_transcript(behavior_for(0.943, 0.924), params(n, 4));
  std::int64_t kept = 0;
  for (const auto& r : tr.rounds) {
    const bool zeroed = (r.s == 1 && r.t == 0) || (r.s == 0 && r.t == 1 && r.x == 1 && r.y == 2);
    kept += !zeroed;
  }
  const double g = diqkd::eat::gamma_eff(0.26, 0.13);
  EXPECT_NEAR(g, 1 - 0.13 - 0.13 + 1.5 * 0.26 * 0.13, 1e-15);
  const double sigma = std::sqrt(n * g * (1 - g)) / n;
  EXPECT_NEAR(static_cast<double>(kept) / n, g, 3 * sigma);
}

TEST(TestStatistic, Values) {
  Transcript empty;
  EXPECT_EQ(test_statistic(empty), 0.0);
  Transcript wins;
  wins.rounds.assign(10, RoundRecord{0, 0, 0, 0, 0, 0, 1});
  EXPECT_EQ(test_statistic(wins), 1.0);
  const auto tr = generate_transcript(behavior_for(0.943, 0.924), params(100000, 8));
  EXPECT_EQ(test_statistic(tr), test_statistic(sift(tr)));
}

TEST(TestStatistic, HonestMean) {
  // v_x chosen so that √2 (v_z + v_x) = 2.612.
  const double v_x = 2.612 / std::sqrt(2.0) - 0.943;
  const std::int64_t n = 1000000;
  const auto tr = generate_transcript(behavior_for(0.943, v_x), params(n, 12));
  const double mu = 0.26 * 0.13 * 0.8265;
  const double sigma = std::sqrt(n * mu * (1 - mu)) / n;
  EXPECT_NEAR(mu, 0.02794, 1e-5);
  EXPECT_NEAR(test_statistic(tr), mu, 3 * sigma);
}

TEST(Accept, Threshold) {
  ProtocolParams p;
  p.delta = 0.001;
  const double thr = p.gamma_A * p.gamma_B * p.omega_exp - p.delta;
  EXPECT_TRUE(accept(thr, p));
  EXPECT_FALSE(accept(std::nextafter(thr, 0.0), p));
  p.delta = 0.0;
  EXPECT_FALSE(accept(0.0, p));
}

TEST(Accept, HonestAbortRateWithinCompleteness) {
  const double v_x = 2.612 / std::sqrt(2.0) - 0.943;
  const auto beh = behavior_for(0.943, v_x);
  ProtocolParams p = params(10000, 0);
  p.delta = diqkd::eat::delta_for_completeness(10000, p.gamma_A, p.gamma_B, p.omega_exp, 0.01);
  int aborts = 0;
  const int runs = 200;
  for (int i = 0; i < runs; ++i) {
    p.seed = 1000 + i;
    aborts += !accept(test_statistic(generate_transcript(beh, p)), p);
  }
  EXPECT_LE(aborts, static_cast<int>(0.01 * runs));
}

TEST(Estimate, IdealState) {
  const auto tr = generate_transcript(behavior_for(1.0, 1.0), params(1000000, 21));
  const auto e = estimate(sift(tr));
  EXPECT_FALSE(e.flagged);
  EXPECT_NEAR(e.S_hat, 2 * std::sqrt(2.0), 3 * e.S_err);
  EXPECT_EQ(e.Q_hat, 0.0);
}

TEST(Estimate, CalibratedState) {
  const auto tr = generate_transcript(behavior_for(0.943, 0.924), params(1208000, 22));
  const auto e = estimate(sift(tr));
  EXPECT_NEAR(e.Q_hat, 0.0285, 3 * e.Q_err);
  EXPECT_NEAR(e.S_hat, std::sqrt(2.0) * (0.943 + 0.924), 3 * e.S_err);
}

TEST(Estimate, FlagsEmptyCells) {
  const auto e = estimate(generate_transcript(behavior_for(0.943, 0.924), params(5, 1)));
  EXPECT_TRUE(e.flagged);
}

TEST(Estimate, TallyMergeIsAssociative) {
  const auto tr = generate_transcript(behavior_for(0.943, 0.924), params(30000, 2));
  Tally a, b, all;
  for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
    (i < 12345 ? a : b).add(tr.rounds[i]);
    all.add(tr.rounds[i]);
  }
  a.merge(b);
  EXPECT_EQ(a.test, all.test);
  EXPECT_EQ(a.c_counts, all.c_counts);
  EXPECT_EQ(a.key_errors, all.key_errors);
}

TEST(Serialization, RoundTrip) {
  auto tr = generate_transcript(behavior_for(0.943, 0.924), params(1000, 31));
  tr.params.delta = 0.0123;
  std::stringstream ss;
  write_transcript(ss, tr);
  const auto back = read_transcript(ss);
  EXPECT_EQ(back.rounds, tr.rounds);
  EXPECT_EQ(back.params.seed, tr.params.seed);
  EXPECT_EQ(back.params.n, tr.params.n);
  EXPECT_EQ(back.params.delta, tr.params.delta);
  EXPECT_EQ(back.params.omega_exp, tr.params.omega_exp);
}

TEST(Serialization, RejectsMalformedInput) {
  std::stringstream bad("# not a transcript\n");
  EXPECT_THROW(read_transcript(bad), std::runtime_error);
  auto tr = generate_transcript(deterministic_zero(), params(3, 1));
  std::stringstream ss;
  write_transcript(ss, tr);
  std::string text = ss.str();
  text.replace(text.rfind('\n', text.size() - 2) + 1, 1, "7");
  std::stringstream broken(text);
  EXPECT_THROW(read_transcript(broken), std::runtime_error);
}

}  // namespace

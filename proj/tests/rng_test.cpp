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

#include <gtest/gtest.h>

#include "diqkd/rng.hpp"

namespace {

using namespace diqkd::rng;

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitInterval) {
  EXPECT_EQ(to_unit(0, 0), 0.0);
  EXPECT_LT(to_unit(0xffffffff, 0xffffffff), 1.0);
  EXPECT_NEAR(to_unit(0x80000000, 0), 0.5, 0.0);
}

TEST(Philox, RoundBlocksAreStateless) {
  EXPECT_EQ(round_block(42, 1000, 1), round_block(42, 1000, 1));
  EXPECT_NE(round_block(42, 1000, 1), round_block(42, 1000, 0));
  EXPECT_NE(round_block(42, 1000, 1), round_block(43, 1000, 1));
  EXPECT_NE(round_block(42, 1ull << 32, 0), round_block(42, 0, 0));
}

TEST(Philox, UniformMean) {
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto w = round_block(7, i, 0);
    sum += to_unit(w[0], w[1]);
  }
  // Mean of U(0,1) has standard deviation 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

}  // namespace

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

namespace diqkd::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
Counter philox4x32_10(Counter ctr, Key key);

/// Uniform double in [0, 1) from two 32-bit words (53 random bits).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Stateless random words for one protocol round: block j of round i is
/// philox(ctr = (lo(i), hi(i), j, 0), key = (lo(seed), hi(seed))).
inline Counter round_block(std::uint64_t seed, std::uint64_t round, std::uint32_t block) {
  return philox4x32_10({static_cast<std::uint32_t>(round), static_cast<std::uint32_t>(round >> 32), block, 0},
                       {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

/// Total number of Philox blocks produced by round_block callers that report
/// through note_draws. Used to check that analytic runs draw nothing.
std::uint64_t draws_total();
void note_draws(std::uint64_t count);

}  // namespace diqkd::rng

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
#include <string>
#include <vector>

namespace diqkd::post {

/// Bits packed little-endian: bit i is bit (i % 64) of word i / 64. Bits past
/// size() are always zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t size);
  static BitString from_bits(const std::vector<int>& bits);

  std::size_t size() const { return size_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v);
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& mutable_words() { return words_; }
  /// Clears bits beyond size() after direct word writes.
  void trim();

  BitString& operator^=(const BitString& o);
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }
  bool operator==(const BitString& o) const = default;

  std::size_t popcount() const;

  /// "<bit length>:<hex>", bit 0 being the high bit of the first hex digit.
  std::string to_hex() const;
  static BitString from_hex(const std::string& s);

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Diagonal-constant matrix T[i][j] = bits[i - j + m - 1] for an m-bit input
/// and l-bit output.
struct ToeplitzSeed {
  std::size_t m = 0;
  std::size_t l = 0;
  BitString bits;

  ToeplitzSeed(std::size_t m_in, std::size_t l_in, BitString b);
};

/// T · raw over GF(2). Output rows may be split across workers.
BitString toeplitz_extract(const BitString& raw, const ToeplitzSeed& seed, std::size_t l,
                           int workers = 1);

/// Two 128-bit field elements; word 0 holds the low coefficients.
struct TagKey {
  std::array<std::uint64_t, 2> k1{};
  std::array<std::uint64_t, 2> k2{};
};

inline constexpr std::uint64_t kMaxTagBits = std::uint64_t{1} << 61;

/// Polynomial hash over GF(2^128) (x^128 + x^7 + x^2 + x + 1): with blocks
/// M_1..M_L of 128 bits, acc = (...((M_1 k1) + M_2) k1 ...) k1 + bitlen and
/// the tag is the low 64 bits of acc · k2. Two distinct messages collide for
/// at most L / 2^128 + 2^-64 of keys, which is below 2^-61 for messages up to
/// 2^61 bits. The empty message has tag 0.
std::uint64_t verify_tag(const BitString& message, const TagKey& key);

/// Collision bound L / 2^128 + 2^-64 for a message of the given bit length.
double tag_collision_bound(std::uint64_t bits);

namespace detail {
using U128 = std::array<std::uint64_t, 2>;
U128 gf128_mul_portable(const U128& a, const U128& b);
U128 gf128_mul(const U128& a, const U128& b);
bool has_clmul();
}  // namespace detail

}  // namespace diqkd::post

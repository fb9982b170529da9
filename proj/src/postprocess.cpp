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

#include "diqkd/postprocess.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <utility>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define DIQKD_HAVE_X86 1
#endif

namespace diqkd::post {
namespace {

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

using detail::U128;

// Reduces a 256-bit product (lo, hi) modulo x^128 + x^7 + x^2 + x + 1.
U128 reduce(std::array<std::uint64_t, 4> p) {
  // Fold words 3 and 2 down: x^128 = x^7 + x^2 + x + 1.
  for (int w = 3; w >= 2; --w) {
    const std::uint64_t h = p[w];
    p[w] = 0;
    p[w - 2] ^= h ^ (h << 1) ^ (h << 2) ^ (h << 7);
    p[w - 1] ^= (h >> 63) ^ (h >> 62) ^ (h >> 57);
  }
  return {p[0], p[1]};
}

std::array<std::uint64_t, 2> clmul64_portable(std::uint64_t a, std::uint64_t b) {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  for (int i = 0; i < 64; ++i) {
    if ((b >> i) & 1u) {
      lo ^= a << i;
      if (i) hi ^= a >> (64 - i);
    }
  }
  return {lo, hi};
}

#ifdef DIQKD_HAVE_X86
__attribute__((target("pclmul,sse4.1"))) U128 gf128_mul_clmul(const U128& a, const U128& b) {
  const __m128i x = _mm_set_epi64x(static_cast<long long>(a[1]), static_cast<long long>(a[0]));
  const __m128i y = _mm_set_epi64x(static_cast<long long>(b[1]), static_cast<long long>(b[0]));
  const __m128i ll = _mm_clmulepi64_si128(x, y, 0x00);
  const __m128i hh = _mm_clmulepi64_si128(x, y, 0x11);
  const __m128i lh = _mm_xor_si128(_mm_clmulepi64_si128(x, y, 0x10), _mm_clmulepi64_si128(x, y, 0x01));
  std::array<std::uint64_t, 4> p{};
  p[0] = static_cast<std::uint64_t>(_mm_extract_epi64(ll, 0));
  p[1] = static_cast<std::uint64_t>(_mm_extract_epi64(ll, 1)) ^ static_cast<std::uint64_t>(_mm_extract_epi64(lh, 0));
  p[2] = static_cast<std::uint64_t>(_mm_extract_epi64(hh, 0)) ^ static_cast<std::uint64_t>(_mm_extract_epi64(lh, 1));
  p[3] = static_cast<std::uint64_t>(_mm_extract_epi64(hh, 1));
  return reduce(p);
}
#endif

// Output bits [row_lo, row_hi) of T · raw. rev_shift[r] holds the reversed
// input shifted up by r bits, so that output i = 64q + r is the parity of
// seed words q.. ANDed with rev_shift[r].
void extract_rows(const std::vector<std::vector<std::uint64_t>>& rev_shift,
                  const std::vector<std::uint64_t>& seed, std::size_t row_lo, std::size_t row_hi,
                  std::vector<std::uint64_t>& out) {
  for (std::size_t i = row_lo; i < row_hi; ++i) {
    const std::size_t q = i >> 6;
    const auto& rs = rev_shift[i & 63];
    const std::uint64_t* sw = seed.data() + q;
    const std::size_t n = std::min(rs.size(), seed.size() - q);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < n; ++w) acc ^= sw[w] & rs[w];
    if (std::popcount(acc) & 1) out[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
}

}  // namespace

BitString::BitString(std::size_t size) : size_(size), words_(word_count(size), 0) {}

BitString BitString::from_bits(const std::vector<int>& bits) {
  BitString out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw std::invalid_argument("BitString: bits must be 0 or 1");
    out.set(i, bits[i] != 0);
  }
  return out;
}

void BitString::set(std::size_t i, bool v) {
  if (i >= size_) throw std::out_of_range("BitString::set");
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (v) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

void BitString::trim() {
  if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
}

BitString& BitString::operator^=(const BitString& o) {
  if (o.size_ != size_) throw std::invalid_argument("BitString: length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
  return *this;
}

std::size_t BitString::popcount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::string BitString::to_hex() const {
  static const char* kDigits = "0123456789abcdef";
  std::string out = std::to_string(size_) + ":";
  for (std::size_t i = 0; i < size_; i += 4) {
    int nibble = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      nibble <<= 1;
      if (i + k < size_ && get(i + k)) nibble |= 1;
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

BitString BitString::from_hex(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0) throw std::invalid_argument("BitString: missing length header");
  std::size_t size = 0;
  for (std::size_t i = 0; i < colon; ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BitString: bad length header");
    size = size * 10 + static_cast<std::size_t>(s[i] - '0');
  }
  const std::string hex = s.substr(colon + 1);
  if (hex.size() != (size + 3) / 4) throw std::invalid_argument("BitString: hex length does not match header");
  BitString out(size);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const char ch = hex[d];
    int v;
    if (ch >= '0' && ch <= '9') {
      v = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      v = ch - 'a' + 10;
    } else if (ch >= 'A' && ch <= 'F') {
      v = ch - 'A' + 10;
    } else {
      throw std::invalid_argument("BitString: bad hex digit");
    }
    for (int k = 0; k < 4; ++k) {
      const std::size_t i = 4 * d + static_cast<std::size_t>(k);
      const bool bit = (v >> (3 - k)) & 1;
      if (i < size) {
        out.set(i, bit);
      } else if (bit) {
        throw std::invalid_argument("BitString: nonzero padding bits");
      }
    }
  }
  return out;
}

ToeplitzSeed::ToeplitzSeed(std::size_t m_in, std::size_t l_in, BitString b) : m(m_in), l(l_in), bits(std::move(b)) {
  const std::size_t want = m + l == 0 ? 0 : m + l - 1;
  if (bits.size() != want) throw std::invalid_argument("ToeplitzSeed: seed must have m + l - 1 bits");
}

BitString toeplitz_extract(const BitString& raw, const ToeplitzSeed& seed, std::size_t l, int workers) {
  const std::size_t m = raw.size();
  if (seed.m != m || seed.l != l) throw std::invalid_argument("toeplitz_extract: seed shape does not match");
  if (l > m) throw std::invalid_argument("toeplitz_extract: output longer than input");
  BitString out(l);
  if (l == 0) return out;

  // out[i] = XOR_j seed[i + j'] rev[j'] with rev[j'] = raw[m - 1 - j'].
  BitString rev(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (raw.get(j)) rev.set(m - 1 - j, true);
  }
  const std::size_t span = word_count(m + 63);
  std::vector<std::vector<std::uint64_t>> rev_shift(64, std::vector<std::uint64_t>(span, 0));
  for (std::size_t r = 0; r < 64; ++r) {
    auto& dst = rev_shift[r];
    for (std::size_t w = 0; w < rev.words().size(); ++w) {
      const std::uint64_t v = rev.words()[w];
      dst[w] |= v << r;
      if (r && w + 1 < span) dst[w + 1] |= v >> (64 - r);
    }
  }

  const std::size_t nw = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, word_count(l));
  auto& words = out.mutable_words();
  if (nw == 1) {
    extract_rows(rev_shift, seed.bits.words(), 0, l, words);
  } else {
    // Split on word boundaries so threads never share an output word.
    const std::size_t total = word_count(l);
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < nw; ++k) {
      const std::size_t lo = std::min(l, 64 * (total * k / nw));
      const std::size_t hi = std::min(l, 64 * (total * (k + 1) / nw));
      pool.emplace_back([&, lo, hi] { extract_rows(rev_shift, seed.bits.words(), lo, hi, words); });
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

namespace detail {

U128 gf128_mul_portable(const U128& a, const U128& b) {
  const auto ll = clmul64_portable(a[0], b[0]);
  const auto hh = clmul64_portable(a[1], b[1]);
  const auto lh = clmul64_portable(a[0], b[1]);
  const auto hl = clmul64_portable(a[1], b[0]);
  return reduce({ll[0], ll[1] ^ lh[0] ^ hl[0], hh[0] ^ lh[1] ^ hl[1], hh[1]});
}

bool has_clmul() {
#ifdef DIQKD_HAVE_X86
  static const bool ok = __builtin_cpu_supports("pclmul") && __builtin_cpu_supports("sse4.1");
  return ok;
#else
  return false;
#endif
}

U128 gf128_mul(const U128& a, const U128& b) {
#ifdef DIQKD_HAVE_X86
  if (has_clmul()) return gf128_mul_clmul(a, b);
#endif
  return gf128_mul_portable(a, b);
}

}  // namespace detail

std::uint64_t verify_tag(const BitString& message, const TagKey& key) {
  const std::uint64_t bits = message.size();
  if (bits > kMaxTagBits) throw std::length_error("verify_tag: message longer than 2^61 bits");
  if (bits == 0) return 0;
  const auto& w = message.words();
  U128 acc{0, 0};
  for (std::size_t i = 0; i < w.size(); i += 2) {
    acc[0] ^= w[i];
    if (i + 1 < w.size()) acc[1] ^= w[i + 1];
    acc = detail::gf128_mul(acc, key.k1);
  }
  acc[0] ^= bits;
  return detail::gf128_mul(acc, key.k2)[0];
}

double tag_collision_bound(std::uint64_t bits) {
  const double blocks = std::ceil(static_cast<double>(bits) / 128.0);
  return blocks * 0x1.0p-128 + 0x1.0p-64;
}

}  // namespace diqkd::post

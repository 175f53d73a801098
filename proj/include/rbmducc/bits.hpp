// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace rbmducc {

/// Occupation bit-string; bit p set means spin orbital (qubit) p occupied.
using Bits = std::uint64_t;

inline constexpr int kMaxModes = 64;

[[nodiscard]] constexpr int popcount(Bits b) noexcept { return std::popcount(b); }

[[nodiscard]] constexpr bool test_bit(Bits b, int p) noexcept {
  return ((b >> p) & Bits{1}) != 0;
}

[[nodiscard]] constexpr Bits bit(int p) noexcept { return Bits{1} << p; }

[[nodiscard]] constexpr Bits low_mask(int n) noexcept {
  return n >= 64 ? ~Bits{0} : (bit(n) - 1);
}

[[nodiscard]] inline Bits mask_of(const std::vector<int> &idx) noexcept {
  Bits m = 0;
  for (int p : idx)
    m |= bit(p);
  return m;
}

[[nodiscard]] inline std::vector<int> indices_of(Bits b) {
  std::vector<int> out;
  while (b) {
    out.push_back(std::countr_zero(b));
    b &= b - 1;
  }
  return out;
}

/// Qubit 0 is the leftmost character.
[[nodiscard]] inline std::string to_bitstring(Bits b, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int p = 0; p < n; ++p)
    if (test_bit(b, p))
      s[static_cast<std::size_t>(p)] = '1';
  return s;
}

[[nodiscard]] inline Bits from_bitstring(const std::string &s) {
  Bits b = 0;
  for (std::size_t p = 0; p < s.size(); ++p)
    if (s[p] == '1')
      b |= bit(static_cast<int>(p));
  return b;
}

} // namespace rbmducc

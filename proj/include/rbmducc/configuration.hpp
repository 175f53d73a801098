// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rbmducc/bits.hpp"

namespace rbmducc {

/// Occupation bit-string with an associated probability.
struct Configuration {
  Bits bits = 0;
  double probability = 0.0;

  friend bool operator==(const Configuration &, const Configuration &) = default;
};

/// Number of reference-occupied positions vacated by `config`.
/// Throws SectorError when the particle numbers differ.
[[nodiscard]] int excitation_rank(Bits config, Bits reference);

} // namespace rbmducc

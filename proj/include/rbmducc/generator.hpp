// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "rbmducc/bits.hpp"
#include "rbmducc/integrals.hpp"

namespace rbmducc {

enum class GeneratorKind { excitation, scatterer };

/// Which index pattern a scatterer follows.
///   occupied_transition: a_c^+ a_l^+ a_i a_k - h.c. with i,k,l occupied, c virtual
///   virtual_transition:  a_c^+ a_b^+ a_e a_k - h.c. with k occupied, b,c,e virtual
enum class ScattererPattern { none, occupied_transition, virtual_transition };

/// Anti-hermitian fermionic generator tau - tau^+ with
/// tau = a^+_{c0} a^+_{c1} ... a_{d1} a_{d0}.
///
/// Excitations keep both index lists sorted ascending. Scatterers keep the
/// pattern-specific layout documented on make_scatterer.
class Generator {
public:
  Generator() = default;

  /// Particle-hole excitation; indices are sorted, and must be distinct.
  static Generator excitation(std::vector<int> holes, std::vector<int> particles);

  /// Two-body scatterer. For the occupied-transition pattern pass
  /// creations = {c, l}, destructions = {k, i}; for the virtual-transition
  /// pattern creations = {c, b}, destructions = {k, e}. The destruction pair
  /// is sorted for the first pattern and the creation pair for the second.
  static Generator scatterer(std::vector<int> creations, std::vector<int> destructions,
                             const SpinOrbitalIndexing &occ);

  [[nodiscard]] GeneratorKind kind() const noexcept { return kind_; }
  [[nodiscard]] ScattererPattern pattern() const noexcept { return pattern_; }
  [[nodiscard]] const std::vector<int> &creations() const noexcept { return creations_; }
  [[nodiscard]] const std::vector<int> &destructions() const noexcept {
    return destructions_;
  }
  /// Particle-hole rank; scatterers count as one.
  [[nodiscard]] int rank() const noexcept {
    return kind_ == GeneratorKind::scatterer ? 1 : static_cast<int>(creations_.size());
  }
  [[nodiscard]] bool is_scatterer() const noexcept {
    return kind_ == GeneratorKind::scatterer;
  }

  /// Highest mode index touched plus one.
  [[nodiscard]] int span() const noexcept;

  /// Determinant reached by the excitation from `reference`, or nullopt when
  /// the generator annihilates it.
  [[nodiscard]] std::optional<Bits> apply_to(Bits reference) const noexcept;

  /// Compact label such as "D(0,5->2,7)" or "Socc(0,1->3,5)".
  [[nodiscard]] std::string label() const;

  /// Checks index ranges and the excitation/scatterer invariants against a
  /// reference. Throws InvalidGeneratorError.
  void validate(const SpinOrbitalIndexing &occ) const;

  /// Lexicographic on (destructions, creations), then kind.
  friend auto operator<=>(const Generator &a, const Generator &b) {
    if (auto c = a.destructions_ <=> b.destructions_; c != 0)
      return c;
    if (auto c = a.creations_ <=> b.creations_; c != 0)
      return c;
    return a.kind_ <=> b.kind_;
  }
  friend bool operator==(const Generator &, const Generator &) = default;

private:
  GeneratorKind kind_ = GeneratorKind::excitation;
  ScattererPattern pattern_ = ScattererPattern::none;
  std::vector<int> creations_;
  std::vector<int> destructions_;
};

/// All Sz-conserving excitations of the given rank from the reference.
[[nodiscard]] std::vector<Generator> enumerate_excitations(const SpinOrbitalIndexing &occ,
                                                           int rank);

} // namespace rbmducc

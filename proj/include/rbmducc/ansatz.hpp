// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ansatz.hpp
 * @brief Ordered disentangled-UCC products and scatterer factorizations.
 *
 * Factors are stored in application order: factors()[0] acts first on the
 * reference, so the written product U = ... e^{t1 K1} e^{t0 K0} reads the
 * list right to left. Each factor owns exactly one parameter slot, equal to
 * its position.
 */

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmducc/configuration.hpp"
#include "rbmducc/generator.hpp"
#include "rbmducc/integrals.hpp"

namespace rbmducc {

struct AnsatzFactor {
  Generator generator;
  /// Probability of the determinant the excitation reaches from the reference.
  double probability = 0.0;
  /// |MP2 amplitude| for excitations, MP2 measure for scatterers.
  double measure = 0.0;
  /// Slot of the double a scatterer is paired with.
  std::optional<std::size_t> paired_double;

  friend bool operator==(const AnsatzFactor &, const AnsatzFactor &) = default;
};

class OrderedAnsatz {
public:
  OrderedAnsatz() = default;

  [[nodiscard]] std::size_t size() const noexcept { return factors_.size(); }
  [[nodiscard]] bool empty() const noexcept { return factors_.empty(); }
  [[nodiscard]] const std::vector<AnsatzFactor> &factors() const noexcept {
    return factors_;
  }
  [[nodiscard]] const AnsatzFactor &operator[](std::size_t i) const { return factors_[i]; }

  void append(AnsatzFactor f) { factors_.push_back(std::move(f)); }

  /// Slot of the first factor with this generator.
  [[nodiscard]] std::optional<std::size_t> find(const Generator &g) const;
  [[nodiscard]] std::size_t count_scatterers() const;
  /// Number of factors that are excitations of the given rank.
  [[nodiscard]] std::size_t count_rank(int rank) const;
  /// Scatterer slots paired to `double_slot`, in application order.
  [[nodiscard]] std::vector<std::size_t> scatterers_of(std::size_t double_slot) const;

  /// Checks the doubles-then-singles layout with scatterers placed directly
  /// after their double. Throws PairingError.
  void validate_layout() const;

  friend bool operator==(const OrderedAnsatz &, const OrderedAnsatz &) = default;

private:
  friend OrderedAnsatz insert_scatterers(const OrderedAnsatz &, std::span<const AnsatzFactor>,
                                         std::size_t);
  std::vector<AnsatzFactor> factors_;
};

/// Singles from the reference plus doubles with |t| > mp2_threshold; doubles
/// block (lexicographic) applied first, then singles (lexicographic).
/// Doubles with a degenerate denominator are screened out.
[[nodiscard]] OrderedAnsatz build_duccsd_pool(const PerturbationModel &model,
                                              double mp2_threshold);

/// Unscreened particle-hole ansatz with every Sz-conserving excitation of
/// rank 1..max_rank. Application order: doubles, then ranks 3..max_rank, then
/// singles; lexicographic within each block.
[[nodiscard]] OrderedAnsatz build_conventional(const SpinOrbitalIndexing &occ, int max_rank);

struct ReorderOptions {
  double prob_threshold = 1e-5;
  /// When false, singles are kept regardless of their probability.
  bool screen_singles = true;
};

/// Doubles block then singles block, each by descending probability of the
/// determinant the excitation reaches (ties: lexicographic generator order);
/// operators below the threshold are dropped. Throws AmbiguityError when two
/// generators reach the same determinant.
[[nodiscard]] OrderedAnsatz reorder_by_probability(const OrderedAnsatz &ansatz,
                                                   std::span<const Configuration> configs,
                                                   Bits reference,
                                                   const ReorderOptions &options = {});

/// Excitation taking `reference` to `target` (equal particle number).
[[nodiscard]] Generator excitation_between(Bits reference, Bits target);

/// Unique scatterer s with [s, K_from] proportional to K_to, when the
/// excitations differ by one rank in the raising pattern.
[[nodiscard]] std::optional<Generator> raising_scatterer(const Generator &from,
                                                         const Generator &to,
                                                         const SpinOrbitalIndexing &occ);

/// lambda with [s, K_from] = lambda K_to computed in the qubit image, or
/// nullopt if the commutator is not proportional.
[[nodiscard]] std::optional<double> commutator_coupling(const Generator &scatterer,
                                                        const Generator &from,
                                                        const Generator &to, int n_qubits);

/// MP2 measure of a scatterer, |<c d||k l>/(e_k + e_l - e_c - e_d)|.
[[nodiscard]] double scatterer_mp2_measure(const PerturbationModel &model,
                                           const Generator &scatterer);
[[nodiscard]] double scatterer_mp2_measure(const MolecularIntegrals &ints,
                                           const SpinOrbitalIndexing &occ,
                                           const Generator &scatterer);

struct Factorization {
  Generator target;
  std::size_t double_slot = 0;
  /// In application order; two entries for quadruples.
  std::vector<Generator> scatterers;
  std::vector<double> measures;
  /// Product of the scatterer measures.
  double measure = 0.0;
  /// Product of the commutator couplings (each +-1).
  double coupling = 0.0;
};

enum class FactorizationVerdict { accepted, no_pairing, below_threshold };

struct FactorizationOutcome {
  FactorizationVerdict verdict = FactorizationVerdict::no_pairing;
  /// Best candidate found, present whenever verdict != no_pairing.
  std::optional<Factorization> best;
  [[nodiscard]] bool accepted() const noexcept {
    return verdict == FactorizationVerdict::accepted;
  }
};

[[nodiscard]] const char *to_string(FactorizationVerdict v) noexcept;

/// Searches (double in the ansatz, scatterer[s]) combinations generating the
/// target determinant (rank 3 through one scatterer, rank 4 through a nested
/// pair) and keeps the one with the largest measure product. Throws RankError
/// when the target rank is below 3.
[[nodiscard]] FactorizationOutcome factorize_high_rank(Bits target, const OrderedAnsatz &ansatz,
                                                       const PerturbationModel &model,
                                                       double measure_threshold);

/// Places scatterers directly after the paired double and after any
/// scatterers already attached to it. Throws PairingError unless the slot
/// holds a double excitation.
[[nodiscard]] OrderedAnsatz insert_scatterers(const OrderedAnsatz &ansatz,
                                              std::span<const AnsatzFactor> scatterers,
                                              std::size_t double_slot);

[[nodiscard]] nlohmann::json to_json(const OrderedAnsatz &ansatz);
[[nodiscard]] OrderedAnsatz ansatz_from_json(const nlohmann::json &j,
                                             const SpinOrbitalIndexing &occ);

} // namespace rbmducc

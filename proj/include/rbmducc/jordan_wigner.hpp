// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "rbmducc/generator.hpp"
#include "rbmducc/integrals.hpp"
#include "rbmducc/pauli.hpp"

namespace rbmducc {

/// a_p^+ = (X_p - i Y_p)/2 Z_0...Z_{p-1}; qubit p is spin orbital p.
[[nodiscard]] PauliSum jw_creation(int p, int n_qubits);
[[nodiscard]] PauliSum jw_annihilation(int p, int n_qubits);

/// a^+_{c0} a^+_{c1} ... a_{d1} a_{d0}.
[[nodiscard]] PauliSum jw_fermion_string(const std::vector<int> &creations,
                                         const std::vector<int> &destructions,
                                         int n_qubits);

/// tau - tau^+ for the generator. Throws InvalidGeneratorError on repeated or
/// out-of-range indices.
[[nodiscard]] PauliSum jw_generator(const Generator &gen, int n_qubits);

/// E_core + sum h_pq a_p^+ a_q + 1/4 sum <pq||rs> a_p^+ a_q^+ a_s a_r.
[[nodiscard]] PauliSum jw_hamiltonian(const MolecularIntegrals &ints,
                                      const SpinOrbitalIndexing &indexing);

/// Total number operator and 2*Sz in block ordering.
[[nodiscard]] PauliSum jw_number(int n_qubits);
[[nodiscard]] PauliSum jw_sz2(int n_spatial);

} // namespace rbmducc

// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file kernels.hpp
 * @brief Statevector inner loops.
 *
 * Every kernel exists twice: `serial::` is the plain reference loop kept for
 * testing and benchmarking, `parallel::` is the OpenMP version used by the
 * simulator. Parallel reductions sum fixed-size chunks in a fixed order, so
 * their result does not depend on the thread count.
 */

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rbmducc/bits.hpp"
#include "rbmducc/pauli.hpp"

namespace rbmducc::kernels {

/// Terms sharing one X mask; coefficients carry the i^{|x&z|} factor so that
/// the group maps |k> to sum_j coeff_j (-1)^{|k & z_j|} |k ^ x>.
struct ObservableGroup {
  Bits x = 0;
  std::vector<Bits> z;
  std::vector<cplx> coeff;
};

struct CompiledObservable {
  int n_qubits = 0;
  std::vector<ObservableGroup> groups;
  std::size_t n_terms = 0;
};

/// Groups a PauliSum by X mask. Each coefficient is multiplied by
/// `weight_damping^weight(P)`, which models symmetric readout flips when the
/// damping is 1 - 2 p_readout.
[[nodiscard]] CompiledObservable compile(const PauliSum &op, double weight_damping = 1.0);

/// Chunk length of the deterministic reductions.
inline constexpr std::size_t kReductionChunk = 2048;

namespace serial {
/// psi <- exp(i phi P) psi.
void rotate(std::span<cplx> psi, Bits x, Bits z, double phi);
/// psi <- P psi.
void apply_pauli(std::span<cplx> psi, Bits x, Bits z);
/// out <- O in.
void apply_observable(const CompiledObservable &op, std::span<const cplx> in,
                      std::span<cplx> out);
/// sum_k conj(a_k) b_k.
[[nodiscard]] cplx inner(std::span<const cplx> a, std::span<const cplx> b);
/// <bra| P |ket>.
[[nodiscard]] cplx pauli_element(std::span<const cplx> bra, std::span<const cplx> ket,
                                 Bits x, Bits z);
} // namespace serial

namespace parallel {
void rotate(std::span<cplx> psi, Bits x, Bits z, double phi);
void apply_pauli(std::span<cplx> psi, Bits x, Bits z);
void apply_observable(const CompiledObservable &op, std::span<const cplx> in,
                      std::span<cplx> out);
[[nodiscard]] cplx inner(std::span<const cplx> a, std::span<const cplx> b);
[[nodiscard]] cplx pauli_element(std::span<const cplx> bra, std::span<const cplx> ket,
                                 Bits x, Bits z);
} // namespace parallel

/// Worker count OpenMP will use (1 when built without OpenMP).
[[nodiscard]] int max_threads() noexcept;
void set_threads(int n) noexcept;

} // namespace rbmducc::kernels

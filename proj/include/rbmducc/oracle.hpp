// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file oracle.hpp
 * @brief Brute-force reference backend used for verification.
 *
 * Operators are assembled from elementary creation and annihilation actions
 * on occupation-number basis states, with the Jordan-Wigner sign
 * (-1)^(number of occupied modes below p). Nothing here goes through the
 * Pauli algebra, so it can be compared against the qubit mapping directly.
 * Full-space operators are stored sparse; eigenproblems are solved in the
 * particle-number / Sz sector of the reference.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "rbmducc/generator.hpp"
#include "rbmducc/integrals.hpp"
#include "rbmducc/kernels.hpp"
#include "rbmducc/pauli.hpp"

namespace rbmducc::oracle {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Explicit operator on the full 2^n Fock space (stored sparse).
struct DenseOperator {
  int n_qubits = 0;
  SparseMatrix matrix;

  [[nodiscard]] Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(matrix); }
  [[nodiscard]] double norm() const { return matrix.norm(); }
  [[nodiscard]] bool is_hermitian(double tol = 1e-12) const;
  [[nodiscard]] bool is_antihermitian(double tol = 1e-12) const;
};

/// Largest mode count accepted by the oracle.
inline constexpr int kMaxModes = 14;

/// a_p or a_p^+ on basis state k; nullopt when the result vanishes.
[[nodiscard]] std::optional<std::pair<Bits, double>> ladder(Bits k, int p, bool create);

/// Matrix of a^+_{c0} a^+_{c1} ... a_{d1} a_{d0}. Throws InvalidGeneratorError
/// on repeated indices within either list or indices outside [0, n).
[[nodiscard]] DenseOperator dense_from_fermion_string(const std::vector<int> &creations,
                                                      const std::vector<int> &destructions,
                                                      int n_modes);
/// tau - tau^+ for the generator.
[[nodiscard]] DenseOperator dense_generator(const Generator &gen, int n_modes);
/// Matrix of a Pauli sum, built letter by letter.
[[nodiscard]] DenseOperator dense_from_pauli(const PauliSum &sum);
/// Second-quantized molecular Hamiltonian in block spin-orbital ordering.
[[nodiscard]] DenseOperator dense_hamiltonian(const MolecularIntegrals &ints);

[[nodiscard]] DenseOperator commutator(const DenseOperator &a, const DenseOperator &b);
/// Largest elementwise |a - b|.
[[nodiscard]] double max_abs_difference(const DenseOperator &a, const DenseOperator &b);

/// H|k> as a list of (basis state, amplitude) pairs, duplicates merged.
[[nodiscard]] std::vector<std::pair<Bits, double>> hamiltonian_column(const MolecularIntegrals &ints,
                                                                      Bits k);
/// <bra|H|ket>.
[[nodiscard]] double matrix_element(const MolecularIntegrals &ints, Bits bra, Bits ket);

/// All determinants with the given alpha/beta electron counts.
[[nodiscard]] std::vector<Bits> sector_basis(int n_spatial, int n_alpha, int n_beta);

struct FciResult {
  double energy = 0.0;
  /// Ground state on the full 2^n register.
  std::vector<cplx> vector;
  double residual = 0.0;
  std::size_t sector_dim = 0;
};

/// Lowest eigenpair in the sector of the reference determinant.
/// Throws ResourceError beyond kMaxModes spin orbitals.
[[nodiscard]] FciResult fci_ground(const MolecularIntegrals &ints,
                                   const SpinOrbitalIndexing &occ);

/// Orbital energies from Koopmans differences of diagonal determinant
/// energies: e_a = <a+ Phi|H|a+ Phi> - E0, e_i = E0 - <a_i Phi|H|a_i Phi>.
[[nodiscard]] std::vector<double> koopmans_energies(const MolecularIntegrals &ints,
                                                    const SpinOrbitalIndexing &occ);

/// Second-order energy sum_D |<D|H|Phi0>|^2 / (e_i + e_j - e_a - e_b) over all
/// doubly excited determinants, with the given orbital energies.
[[nodiscard]] double mp2_bruteforce(const MolecularIntegrals &ints,
                                    const SpinOrbitalIndexing &occ,
                                    const std::vector<double> &epsilon);
/// Same, with the integrals' orbital energies when present, Koopmans otherwise.
[[nodiscard]] double mp2_bruteforce(const MolecularIntegrals &ints,
                                    const SpinOrbitalIndexing &occ);

/// lambda with [s, d] = lambda * target, or nullopt when the commutator is
/// zero or not proportional within tol (relative Frobenius).
[[nodiscard]] std::optional<double> verify_factorization(const Generator &scatterer,
                                                         const Generator &dbl,
                                                         const Generator &target, int n_modes,
                                                         double tol = 1e-10);
/// lambda with [s2, [s1, d]] = lambda * target.
[[nodiscard]] std::optional<double> verify_nested_factorization(const Generator &s1,
                                                                const Generator &s2,
                                                                const Generator &dbl,
                                                                const Generator &target,
                                                                int n_modes,
                                                                double tol = 1e-10);

struct GoldenRecord {
  double fci_energy = 0.0;
  double hf_energy = 0.0;
  double mp2_energy = 0.0;

  friend bool operator==(const GoldenRecord &, const GoldenRecord &) = default;
};

using GoldenStore = std::map<std::string, GoldenRecord>;

[[nodiscard]] GoldenRecord compute_golden(const MolecularIntegrals &ints);
[[nodiscard]] GoldenStore load_golden(const std::string &path);
void save_golden(const GoldenStore &store, const std::string &path);

} // namespace rbmducc::oracle

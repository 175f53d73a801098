// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file integrals.hpp
 * @brief Molecular integrals in FCIDUMP form, spin-orbital expansion and
 *        second-order perturbative (MP2) measures.
 *
 * Spatial integrals use chemists' notation (pq|rs). Spin orbitals are laid out
 * in blocks: spatial orbital p with spin alpha maps to p, with spin beta to
 * p + n_spatial. Antisymmetrized physicists' integrals <pq||rs> are built once
 * per SpinIntegrals instance.
 */

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbmducc/bits.hpp"

namespace rbmducc {

class MolecularIntegrals {
public:
  MolecularIntegrals() = default;
  MolecularIntegrals(int n_spatial, int n_electrons, int ms2);

  [[nodiscard]] int n_spatial() const noexcept { return n_spatial_; }
  [[nodiscard]] int n_electrons() const noexcept { return n_electrons_; }
  [[nodiscard]] int ms2() const noexcept { return ms2_; }
  [[nodiscard]] double core_energy() const noexcept { return core_energy_; }

  [[nodiscard]] double h1(int p, int q) const noexcept {
    return h1_[static_cast<std::size_t>(p * n_spatial_ + q)];
  }
  /// Chemists' notation (pq|rs).
  [[nodiscard]] double h2(int p, int q, int r, int s) const noexcept {
    return h2_[index4(p, q, r, s)];
  }

  [[nodiscard]] const std::optional<std::vector<double>> &
  orbital_energies() const noexcept {
    return orbital_energies_;
  }

  void set_core_energy(double e) noexcept { core_energy_ = e; }
  /// Stores h1[p,q] and h1[q,p].
  void set_h1(int p, int q, double v);
  /// Stores all eight permutational images of (pq|rs).
  void set_h2(int p, int q, int r, int s, double v);
  void set_orbital_energies(std::vector<double> eps);
  void clear_orbital_energies() noexcept { orbital_energies_.reset(); }

  /// Largest violation of the h1 / 8-fold h2 symmetry relations.
  [[nodiscard]] double symmetry_violation() const;

  friend bool operator==(const MolecularIntegrals &,
                         const MolecularIntegrals &) = default;

private:
  [[nodiscard]] std::size_t index4(int p, int q, int r, int s) const noexcept {
    const auto n = static_cast<std::size_t>(n_spatial_);
    return ((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n +
            static_cast<std::size_t>(r)) * n + static_cast<std::size_t>(s);
  }

  int n_spatial_ = 0;
  int n_electrons_ = 0;
  int ms2_ = 0;
  double core_energy_ = 0.0;
  std::vector<double> h1_;
  std::vector<double> h2_;
  std::optional<std::vector<double>> orbital_energies_;
};

/// Reads an FCIDUMP file. Throws ParseError, IndexError or ConsistencyError.
[[nodiscard]] MolecularIntegrals parse_fcidump(const std::string &path);
[[nodiscard]] MolecularIntegrals parse_fcidump_text(const std::string &text);

/// Writes the unique integrals with round-trip exact formatting.
[[nodiscard]] std::string serialize_fcidump(const MolecularIntegrals &ints);
void write_fcidump(const MolecularIntegrals &ints, const std::string &path);

/// Hartree-Fock reference in block spin-orbital ordering.
struct SpinOrbitalIndexing {
  int n_spatial = 0;
  int n_spin = 0;
  std::vector<int> occupied;
  std::vector<int> virtuals;

  [[nodiscard]] Bits reference() const noexcept { return mask_of(occupied); }
  [[nodiscard]] bool is_occupied(int p) const noexcept {
    return test_bit(reference(), p);
  }
  [[nodiscard]] int spatial(int p) const noexcept { return p % n_spatial; }
  /// 0 for alpha, 1 for beta.
  [[nodiscard]] int spin(int p) const noexcept { return p / n_spatial; }
  [[nodiscard]] int n_electrons() const noexcept {
    return static_cast<int>(occupied.size());
  }
  /// Twice the total Sz of the reference.
  [[nodiscard]] int ms2() const noexcept;
};

/// Aufbau occupation on the orbital energies (file order when absent),
/// n_alpha = (N + MS2) / 2 lowest alpha orbitals, n_beta likewise.
[[nodiscard]] SpinOrbitalIndexing make_indexing(const MolecularIntegrals &ints);
/// Indexing with an explicit occupied spin-orbital list.
[[nodiscard]] SpinOrbitalIndexing make_indexing(int n_spatial,
                                                std::vector<int> occupied);

/// Diagonal of the Fock operator for every spin orbital,
/// f_pp = h_pp + sum_i <pi||pi> over the occupied list.
[[nodiscard]] std::vector<double> fock_diagonal(const MolecularIntegrals &ints,
                                                const SpinOrbitalIndexing &occ);

/// Antisymmetrized spin-orbital integrals <pq||rs> = <pq|rs> - <pq|sr>,
/// with <pq|rs> = (pr|qs) when spins match.
class SpinIntegrals {
public:
  explicit SpinIntegrals(const MolecularIntegrals &ints);

  [[nodiscard]] int n_spin() const noexcept { return n_spin_; }
  [[nodiscard]] double one_body(int p, int q) const noexcept {
    return h1_[static_cast<std::size_t>(p * n_spin_ + q)];
  }
  [[nodiscard]] double antisym(int p, int q, int r, int s) const noexcept {
    const auto n = static_cast<std::size_t>(n_spin_);
    return asym_[((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n +
                  static_cast<std::size_t>(r)) * n + static_cast<std::size_t>(s)];
  }
  /// Physicists' <pq|rs> without antisymmetrization.
  [[nodiscard]] double coulomb(int p, int q, int r, int s) const noexcept {
    const auto n = static_cast<std::size_t>(n_spin_);
    return coul_[((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n +
                  static_cast<std::size_t>(r)) * n + static_cast<std::size_t>(s)];
  }

private:
  int n_spin_ = 0;
  std::vector<double> h1_;
  std::vector<double> coul_;
  std::vector<double> asym_;
};

/// Everything the perturbative measures need: antisymmetrized integrals and
/// per-spin-orbital energies (from the file when present).
class PerturbationModel {
public:
  PerturbationModel(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ,
                    bool force_fock_recompute = false);

  [[nodiscard]] const SpinIntegrals &integrals() const noexcept { return spin_; }
  [[nodiscard]] const SpinOrbitalIndexing &indexing() const noexcept { return occ_; }
  [[nodiscard]] std::span<const double> epsilon() const noexcept { return eps_; }

  /// t_ij^ab = <ij||ab> / (e_i + e_j - e_a - e_b). Throws DegeneracyError.
  [[nodiscard]] double amplitude(int i, int j, int a, int b) const;

  /// |<c d||k l> / (e_k + e_l - e_c - e_d)| for creations (c,d) and
  /// destructions (k,l). Throws DegeneracyError.
  [[nodiscard]] double transition_measure(int c, int d, int k, int l) const;

  /// 1/4 sum_ijab |<ij||ab>|^2 / (e_i + e_j - e_a - e_b).
  [[nodiscard]] double energy() const;

private:
  SpinOrbitalIndexing occ_;
  SpinIntegrals spin_;
  std::vector<double> eps_;
};

inline constexpr double kDegenerateDenominator = 1e-12;

[[nodiscard]] double mp2_amplitude(const MolecularIntegrals &ints,
                                   const SpinOrbitalIndexing &occ, int i, int j,
                                   int a, int b);
[[nodiscard]] double mp2_energy(const MolecularIntegrals &ints,
                                const SpinOrbitalIndexing &occ);

} // namespace rbmducc

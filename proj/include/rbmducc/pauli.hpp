// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pauli.hpp
 * @brief Pauli strings in symplectic (x, z) form and their linear combinations.
 *
 * A string with masks (x, z) denotes the tensor product whose letter on qubit
 * q is I, X, Z or Y for (x_q, z_q) = (0,0), (1,0), (0,1), (1,1). Acting on a
 * basis state, P|k> = i^{|x&z|} (-1)^{|k&z|} |k ^ x>.
 */

#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rbmducc/bits.hpp"

namespace rbmducc {

using cplx = std::complex<double>;

struct PauliKey {
  Bits x = 0;
  Bits z = 0;
  friend auto operator<=>(const PauliKey &, const PauliKey &) = default;
};

struct PauliString {
  PauliKey key;
  cplx coefficient{1.0, 0.0};

  [[nodiscard]] int weight() const noexcept { return popcount(key.x | key.z); }
  /// Letters for qubits 0..n-1, qubit 0 first.
  [[nodiscard]] std::string axes(int n_qubits) const;
};

/// Phase and key of the product of two unit-coefficient strings.
[[nodiscard]] std::pair<cplx, PauliKey> multiply(PauliKey a, PauliKey b) noexcept;

[[nodiscard]] constexpr bool commutes(PauliKey a, PauliKey b) noexcept {
  return ((popcount(a.x & b.z) + popcount(a.z & b.x)) & 1) == 0;
}

/// Parses "XZYI" style letters (qubit 0 first).
[[nodiscard]] PauliKey parse_axes(const std::string &axes);

class PauliSum {
public:
  static constexpr double kDropTolerance = 1e-14;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

  static PauliSum identity(int n_qubits, cplx c = 1.0);

  [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
  [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }

  /// Terms in deterministic (x, z) order.
  [[nodiscard]] std::vector<PauliString> terms() const;
  [[nodiscard]] cplx coefficient(PauliKey key) const;

  void add(PauliKey key, cplx c);
  /// Removes terms with |coefficient| below kDropTolerance.
  void compress(double tol = kDropTolerance);

  PauliSum &operator+=(const PauliSum &other);
  PauliSum &operator-=(const PauliSum &other);
  PauliSum &operator*=(cplx s);
  friend PauliSum operator+(PauliSum a, const PauliSum &b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum &b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(const PauliSum &a, const PauliSum &b);

  [[nodiscard]] PauliSum adjoint() const;
  [[nodiscard]] bool is_hermitian(double tol = 1e-12) const;
  [[nodiscard]] bool is_antihermitian(double tol = 1e-12) const;
  /// Identity-string coefficient (trace / 2^n).
  [[nodiscard]] cplx constant() const { return coefficient({0, 0}); }

  /// One line per term, `+0.1234567 XZYI` (imaginary parts suffixed with i).
  [[nodiscard]] std::string to_text() const;

private:
  int n_qubits_ = 0;
  std::map<PauliKey, cplx> terms_;
};

/// True iff every pair of strings in the sum commutes.
[[nodiscard]] bool pauli_mutually_commute(const PauliSum &sum);

} // namespace rbmducc

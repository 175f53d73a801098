// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/pauli.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "rbmducc/error.hpp"

namespace rbmducc {

namespace {

constexpr std::array<cplx, 4> kPowersOfI{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};

} // namespace

std::string PauliString::axes(int n_qubits) const {
  std::string s(static_cast<std::size_t>(n_qubits), 'I');
  for (int q = 0; q < n_qubits; ++q) {
    const bool x = test_bit(key.x, q), z = test_bit(key.z, q);
    s[static_cast<std::size_t>(q)] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  return s;
}

std::pair<cplx, PauliKey> multiply(PauliKey a, PauliKey b) noexcept {
  // letters(x,z) = i^{|x&z|} X^x Z^z, and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1.
  const PauliKey c{a.x ^ b.x, a.z ^ b.z};
  int power = popcount(a.x & a.z) + popcount(b.x & b.z) - popcount(c.x & c.z) +
              2 * popcount(a.z & b.x);
  power = ((power % 4) + 4) % 4;
  return {kPowersOfI[static_cast<std::size_t>(power)], c};
}

PauliKey parse_axes(const std::string &axes) {
  PauliKey k;
  for (std::size_t q = 0; q < axes.size(); ++q) {
    const Bits b = bit(static_cast<int>(q));
    switch (axes[q]) {
    case 'I': break;
    case 'X': k.x |= b; break;
    case 'Y': k.x |= b; k.z |= b; break;
    case 'Z': k.z |= b; break;
    default: throw ParseError(std::string("unknown Pauli letter: ") + axes[q]);
    }
  }
  return k;
}

PauliSum PauliSum::identity(int n_qubits, cplx c) {
  PauliSum s(n_qubits);
  s.add({0, 0}, c);
  return s;
}

std::vector<PauliString> PauliSum::terms() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto &[k, c] : terms_)
    out.push_back({k, c});
  return out;
}

cplx PauliSum::coefficient(PauliKey key) const {
  const auto it = terms_.find(key);
  return it == terms_.end() ? cplx{} : it->second;
}

void PauliSum::add(PauliKey key, cplx c) {
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted)
    it->second += c;
}

void PauliSum::compress(double tol) {
  std::erase_if(terms_, [tol](const auto &kv) { return std::abs(kv.second) < tol; });
}

PauliSum &PauliSum::operator+=(const PauliSum &other) {
  n_qubits_ = std::max(n_qubits_, other.n_qubits_);
  for (const auto &[k, c] : other.terms_)
    add(k, c);
  compress();
  return *this;
}

PauliSum &PauliSum::operator-=(const PauliSum &other) {
  n_qubits_ = std::max(n_qubits_, other.n_qubits_);
  for (const auto &[k, c] : other.terms_)
    add(k, -c);
  compress();
  return *this;
}

PauliSum &PauliSum::operator*=(cplx s) {
  for (auto &kv : terms_)
    kv.second *= s;
  compress();
  return *this;
}

PauliSum operator*(const PauliSum &a, const PauliSum &b) {
  PauliSum out(std::max(a.n_qubits_, b.n_qubits_));
  for (const auto &[ka, ca] : a.terms_)
    for (const auto &[kb, cb] : b.terms_) {
      const auto [phase, kc] = multiply(ka, kb);
      out.add(kc, phase * ca * cb);
    }
  out.compress();
  return out;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_qubits_);
  for (const auto &[k, c] : terms_)
    out.terms_.emplace(k, std::conj(c));
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto &kv : terms_)
    if (std::abs(kv.second.imag()) > tol)
      return false;
  return true;
}

bool PauliSum::is_antihermitian(double tol) const {
  for (const auto &kv : terms_)
    if (std::abs(kv.second.real()) > tol)
      return false;
  return true;
}

std::string PauliSum::to_text() const {
  std::string out;
  for (const auto &[k, c] : terms_) {
    const auto axes = PauliString{k, c}.axes(n_qubits_);
    if (c.imag() == 0.0)
      out += fmt::format("{:+.7f} {}\n", c.real(), axes);
    else if (c.real() == 0.0)
      out += fmt::format("{:+.7f}i {}\n", c.imag(), axes);
    else
      out += fmt::format("({:+.7f}{:+.7f}i) {}\n", c.real(), c.imag(), axes);
  }
  return out;
}

bool pauli_mutually_commute(const PauliSum &sum) {
  const auto t = sum.terms();
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = a + 1; b < t.size(); ++b)
      if (!commutes(t[a].key, t[b].key))
        return false;
  return true;
}

} // namespace rbmducc

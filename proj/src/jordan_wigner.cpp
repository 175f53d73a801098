// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/jordan_wigner.hpp"

#include <algorithm>

#include "rbmducc/error.hpp"

namespace rbmducc {

namespace {

PauliSum ladder(int p, int n_qubits, double sign_of_y) {
  if (p < 0 || p >= n_qubits)
    throw InvalidGeneratorError("mode index out of range");
  PauliSum s(n_qubits);
  const Bits chain = low_mask(p);
  s.add({bit(p), chain}, 0.5);
  s.add({bit(p), chain | bit(p)}, cplx{0.0, 0.5 * sign_of_y});
  return s;
}

} // namespace

PauliSum jw_creation(int p, int n_qubits) { return ladder(p, n_qubits, -1.0); }

PauliSum jw_annihilation(int p, int n_qubits) { return ladder(p, n_qubits, +1.0); }

PauliSum jw_fermion_string(const std::vector<int> &creations,
                           const std::vector<int> &destructions, int n_qubits) {
  PauliSum out = PauliSum::identity(n_qubits);
  for (int p : creations)
    out = out * jw_creation(p, n_qubits);
  for (auto it = destructions.rbegin(); it != destructions.rend(); ++it)
    out = out * jw_annihilation(*it, n_qubits);
  return out;
}

PauliSum jw_generator(const Generator &gen, int n_qubits) {
  std::vector<int> all = gen.creations();
  all.insert(all.end(), gen.destructions().begin(), gen.destructions().end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw InvalidGeneratorError("repeated index in generator " + gen.label());
  if (!all.empty() && (all.front() < 0 || all.back() >= n_qubits))
    throw InvalidGeneratorError("generator index out of range: " + gen.label());
  const PauliSum tau = jw_fermion_string(gen.creations(), gen.destructions(), n_qubits);
  PauliSum k = tau - tau.adjoint();
  // Strip rounding residue so the image is exactly anti-hermitian.
  PauliSum clean(n_qubits);
  for (const auto &t : k.terms())
    clean.add(t.key, cplx{0.0, t.coefficient.imag()});
  clean.compress();
  return clean;
}

PauliSum jw_hamiltonian(const MolecularIntegrals &ints, const SpinOrbitalIndexing &indexing) {
  const int n = indexing.n_spin;
  const SpinIntegrals so(ints);
  std::vector<PauliSum> up, down;
  for (int p = 0; p < n; ++p) {
    up.push_back(jw_creation(p, n));
    down.push_back(jw_annihilation(p, n));
  }
  PauliSum h = PauliSum::identity(n, ints.core_energy());
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (const double v = so.one_body(p, q); v != 0.0)
        h += up[static_cast<std::size_t>(p)] * down[static_cast<std::size_t>(q)] * cplx{v};

  // 1/4 sum over all index quadruples equals the sum over p<q, r<s.
  std::vector<std::pair<int, int>> pairs;
  std::vector<PauliSum> create_pair, destroy_pair;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      pairs.emplace_back(p, q);
      create_pair.push_back(up[static_cast<std::size_t>(p)] * up[static_cast<std::size_t>(q)]);
      destroy_pair.push_back(down[static_cast<std::size_t>(q)] *
                             down[static_cast<std::size_t>(p)]);
    }
  PauliSum two(n);
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = 0; b < pairs.size(); ++b) {
      const auto [p, q] = pairs[a];
      const auto [r, s] = pairs[b];
      const double v = so.antisym(p, q, r, s);
      if (v == 0.0)
        continue;
      for (const auto &ta : create_pair[a].terms())
        for (const auto &tb : destroy_pair[b].terms()) {
          const auto [phase, key] = multiply(ta.key, tb.key);
          two.add(key, phase * ta.coefficient * tb.coefficient * v);
        }
    }
  h += two;

  PauliSum clean(n);
  for (const auto &t : h.terms()) {
    if (std::abs(t.coefficient.imag()) > 1e-10)
      throw HermiticityError("Hamiltonian image has an imaginary coefficient");
    clean.add(t.key, t.coefficient.real());
  }
  clean.compress();
  return clean;
}

PauliSum jw_number(int n_qubits) {
  PauliSum s(n_qubits);
  for (int p = 0; p < n_qubits; ++p) {
    s.add({0, 0}, 0.5);
    s.add({0, bit(p)}, -0.5);
  }
  s.compress();
  return s;
}

PauliSum jw_sz2(int n_spatial) {
  PauliSum s(2 * n_spatial);
  for (int p = 0; p < 2 * n_spatial; ++p)
    s.add({0, bit(p)}, p < n_spatial ? -0.5 : 0.5);
  s.compress();
  return s;
}

} // namespace rbmducc

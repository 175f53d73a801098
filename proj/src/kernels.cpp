// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rbmducc::kernels {

namespace {

using index_t = std::int64_t;

constexpr std::array<cplx, 4> kPowersOfI{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};

// Below this many amplitudes the OpenMP region is skipped.
constexpr index_t kParallelMin = index_t{1} << 12;

inline double parity_sign(Bits k, Bits z) noexcept {
  return (popcount(k & z) & 1) ? -1.0 : 1.0;
}

inline cplx i_power(int n) noexcept { return kPowersOfI[static_cast<std::size_t>(n & 3)]; }

/// Inserts a zero at bit position `pivot` of t.
inline Bits spread(Bits t, int pivot) noexcept {
  const Bits low = t & low_mask(pivot);
  return ((t >> pivot) << (pivot + 1)) | low;
}

} // namespace

CompiledObservable compile(const PauliSum &op, double weight_damping) {
  std::map<Bits, ObservableGroup> by_x;
  std::size_t n = 0;
  for (const auto &t : op.terms()) {
    auto &g = by_x[t.key.x];
    g.x = t.key.x;
    g.z.push_back(t.key.z);
    g.coeff.push_back(t.coefficient * i_power(popcount(t.key.x & t.key.z)) *
                      std::pow(weight_damping, t.weight()));
    ++n;
  }
  CompiledObservable out;
  out.n_qubits = op.n_qubits();
  out.n_terms = n;
  for (auto &kv : by_x)
    out.groups.push_back(std::move(kv.second));
  return out;
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
  if (n > 0)
    omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// ---------------------------------------------------------------------------
// Serial reference
// ---------------------------------------------------------------------------

namespace serial {

void apply_pauli(std::span<cplx> psi, Bits x, Bits z) {
  const std::vector<cplx> old(psi.begin(), psi.end());
  const cplx base = i_power(popcount(x & z));
  for (std::size_t k = 0; k < old.size(); ++k)
    psi[k ^ x] = base * parity_sign(k, z) * old[k];
}

void rotate(std::span<cplx> psi, Bits x, Bits z, double phi) {
  std::vector<cplx> p(psi.begin(), psi.end());
  apply_pauli(p, x, z);
  const double c = std::cos(phi), s = std::sin(phi);
  for (std::size_t k = 0; k < psi.size(); ++k)
    psi[k] = c * psi[k] + cplx{0.0, s} * p[k];
}

void apply_observable(const CompiledObservable &op, std::span<const cplx> in,
                      std::span<cplx> out) {
  std::fill(out.begin(), out.end(), cplx{});
  for (const auto &g : op.groups)
    for (std::size_t j = 0; j < g.z.size(); ++j)
      for (std::size_t k = 0; k < in.size(); ++k)
        out[k ^ g.x] += g.coeff[j] * parity_sign(k, g.z[j]) * in[k];
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc{};
  for (std::size_t k = 0; k < a.size(); ++k)
    acc += std::conj(a[k]) * b[k];
  return acc;
}

cplx pauli_element(std::span<const cplx> bra, std::span<const cplx> ket, Bits x, Bits z) {
  std::vector<cplx> p(ket.begin(), ket.end());
  apply_pauli(p, x, z);
  return inner(bra, p);
}

} // namespace serial

// ---------------------------------------------------------------------------
// OpenMP
// ---------------------------------------------------------------------------

namespace parallel {

void apply_pauli(std::span<cplx> psi, Bits x, Bits z) {
  const auto dim = static_cast<index_t>(psi.size());
  const cplx base = i_power(popcount(x & z));
  if (x == 0) {
#pragma omp parallel for schedule(static) if (dim >= kParallelMin)
    for (index_t k = 0; k < dim; ++k)
      psi[static_cast<std::size_t>(k)] *= base * parity_sign(static_cast<Bits>(k), z);
    return;
  }
  const int pivot = std::countr_zero(x);
  const index_t half = dim / 2;
#pragma omp parallel for schedule(static) if (dim >= kParallelMin)
  for (index_t t = 0; t < half; ++t) {
    const Bits k = spread(static_cast<Bits>(t), pivot);
    const Bits k2 = k ^ x;
    const cplx a = psi[k], b = psi[k2];
    psi[k] = base * parity_sign(k2, z) * b;
    psi[k2] = base * parity_sign(k, z) * a;
  }
}

void rotate(std::span<cplx> psi, Bits x, Bits z, double phi) {
  const auto dim = static_cast<index_t>(psi.size());
  const double c = std::cos(phi), s = std::sin(phi);
  if (x == 0) {
#pragma omp parallel for schedule(static) if (dim >= kParallelMin)
    for (index_t k = 0; k < dim; ++k)
      psi[static_cast<std::size_t>(k)] *=
          cplx{c, s * parity_sign(static_cast<Bits>(k), z)};
    return;
  }
  const cplx base = cplx{0.0, s} * i_power(popcount(x & z));
  const int pivot = std::countr_zero(x);
  const index_t half = dim / 2;
#pragma omp parallel for schedule(static) if (dim >= kParallelMin)
  for (index_t t = 0; t < half; ++t) {
    const Bits k = spread(static_cast<Bits>(t), pivot);
    const Bits k2 = k ^ x;
    const cplx a = psi[k], b = psi[k2];
    psi[k] = c * a + base * parity_sign(k2, z) * b;
    psi[k2] = c * b + base * parity_sign(k, z) * a;
  }
}

void apply_observable(const CompiledObservable &op, std::span<const cplx> in,
                      std::span<cplx> out) {
  const auto dim = static_cast<index_t>(in.size());
  const auto &groups = op.groups;
#pragma omp parallel for schedule(static) if (dim >= kParallelMin)
  for (index_t kk = 0; kk < dim; ++kk) {
    const auto k = static_cast<Bits>(kk);
    cplx acc{};
    for (const auto &g : groups) {
      const Bits src = k ^ g.x;
      if (in[src] == cplx{})
        continue;
      cplx d{};
      for (std::size_t j = 0; j < g.z.size(); ++j)
        d += parity_sign(src, g.z[j]) * g.coeff[j];
      acc += d * in[src];
    }
    out[k] = acc;
  }
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t n = a.size();
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<cplx> partial(chunks);
  const auto nc = static_cast<index_t>(chunks);
#pragma omp parallel for schedule(static) if (static_cast<index_t>(n) >= kParallelMin)
  for (index_t c = 0; c < nc; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t hi = std::min(n, lo + kReductionChunk);
    cplx acc{};
    for (std::size_t k = lo; k < hi; ++k)
      acc += std::conj(a[k]) * b[k];
    partial[static_cast<std::size_t>(c)] = acc;
  }
  cplx total{};
  for (const auto &p : partial)
    total += p;
  return total;
}

cplx pauli_element(std::span<const cplx> bra, std::span<const cplx> ket, Bits x, Bits z) {
  const std::size_t n = ket.size();
  const cplx base = i_power(popcount(x & z));
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<cplx> partial(chunks);
  const auto nc = static_cast<index_t>(chunks);
#pragma omp parallel for schedule(static) if (static_cast<index_t>(n) >= kParallelMin)
  for (index_t c = 0; c < nc; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t hi = std::min(n, lo + kReductionChunk);
    cplx acc{};
    for (std::size_t k = lo; k < hi; ++k)
      acc += std::conj(bra[k ^ x]) * parity_sign(k, z) * ket[k];
    partial[static_cast<std::size_t>(c)] = acc;
  }
  cplx total{};
  for (const auto &p : partial)
    total += p;
  return base * total;
}

} // namespace parallel

} // namespace rbmducc::kernels

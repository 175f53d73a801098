// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts.

#include <map>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "rbmducc/integrals.hpp"
#include "rbmducc/jordan_wigner.hpp"
#include "rbmducc/kernels.hpp"

using namespace rbmducc;

namespace {

std::vector<cplx> random_state(int n) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  std::vector<cplx> v(std::size_t{1} << n);
  for (auto &a : v)
    a = {g(rng), g(rng)};
  return v;
}

Bits mask(int n, unsigned pattern) { return Bits{pattern} & ((Bits{1} << n) - 1); }

template <auto Kernel> void rotate(benchmark::State &st) {
  const int n = static_cast<int>(st.range(0));
  auto psi = random_state(n);
  for (auto _ : st) {
    Kernel(psi, mask(n, 0b1011001), mask(n, 0b0110101), 0.1);
    benchmark::DoNotOptimize(psi.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(psi.size()));
}

template <auto Kernel> void inner(benchmark::State &st) {
  const int n = static_cast<int>(st.range(0));
  const auto a = random_state(n), b = random_state(n);
  for (auto _ : st)
    benchmark::DoNotOptimize(Kernel(a, b));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(a.size()));
}

const kernels::CompiledObservable &hamiltonian(const std::string &id) {
  static std::map<std::string, kernels::CompiledObservable> cache;
  auto it = cache.find(id);
  if (it == cache.end()) {
    const auto ints = parse_fcidump(std::string(RBMDUCC_ASSET_DIR) + "/" + id + ".fcidump");
    it = cache.emplace(id, kernels::compile(jw_hamiltonian(ints, make_indexing(ints)))).first;
  }
  return it->second;
}

template <auto Kernel> void observable(benchmark::State &st, const char *id) {
  const auto &op = hamiltonian(id);
  const auto in = random_state(op.n_qubits);
  std::vector<cplx> out(in.size());
  for (auto _ : st) {
    Kernel(op, in, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetLabel(std::to_string(op.n_terms) + " terms");
}

} // namespace

BENCHMARK(rotate<kernels::serial::rotate>)->Name("rotate/serial")->DenseRange(10, 18, 4);
BENCHMARK(rotate<kernels::parallel::rotate>)->Name("rotate/parallel")->DenseRange(10, 18, 4);
BENCHMARK(inner<kernels::serial::inner>)->Name("inner/serial")->DenseRange(10, 18, 4);
BENCHMARK(inner<kernels::parallel::inner>)->Name("inner/parallel")->DenseRange(10, 18, 4);
void observable_serial(benchmark::State &st, const char *id) {
  observable<kernels::serial::apply_observable>(st, id);
}
void observable_parallel(benchmark::State &st, const char *id) {
  observable<kernels::parallel::apply_observable>(st, id);
}

BENCHMARK_CAPTURE(observable_serial, bh, "bh_2.25");
BENCHMARK_CAPTURE(observable_parallel, bh, "bh_2.25");
BENCHMARK_CAPTURE(observable_serial, h2o, "h2o_0.96")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(observable_parallel, h2o, "h2o_0.96")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

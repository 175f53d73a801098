// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "rbmducc/error.hpp"
#include "rbmducc/jordan_wigner.hpp"
#include "rbmducc/oracle.hpp"
#include "rbmducc/simulator.hpp"
#include "support.hpp"

using namespace rbmducc;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::VectorXcd as_vector(const Statevector &s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t k = 0; k < s.dim(); ++k)
    v(static_cast<Eigen::Index>(k)) = s[k];
  return v;
}

Statevector random_state(int n, std::uint64_t seed) {
  Statevector s(n);
  Rng rng(seed);
  std::normal_distribution<double> g;
  double norm = 0.0;
  for (auto &a : s.amplitudes()) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto &a : s.amplitudes())
    a /= std::sqrt(norm);
  return s;
}

} // namespace

TEST_CASE("reference preparation", "[simulator]") {
  const auto s = prepare_reference(make_indexing(2, {0, 2}));
  CHECK(s.n_qubits() == 4);
  CHECK(s[0b0101] == cplx(1.0));
  CHECK(s.norm() == 1.0);
  CHECK(prepare_reference(make_indexing(2, {}))[0] == cplx(1.0));
  CHECK(prepare_reference(make_indexing(2, {0, 1, 2, 3}))[0b1111] == cplx(1.0));
}

TEST_CASE("overlap", "[simulator]") {
  const auto a = random_state(4, 1);
  CHECK_THAT(overlap(a, a), WithinAbs(1.0, 1e-14));
  CHECK(overlap(Statevector::basis(3, 1), Statevector::basis(3, 2)) == 0.0);
  CHECK_THROWS_AS(overlap(Statevector(3), Statevector(4)), DimensionError);
}

TEST_CASE("exponentials match the dense matrix exponential", "[simulator][property]") {
  const auto occ = make_indexing(4, {0, 1, 4, 5});
  std::vector<Generator> gens;
  for (int r = 1; r <= 3; ++r)
    for (const auto &g : enumerate_excitations(occ, r))
      gens.push_back(g);
  gens.push_back(Generator::scatterer({2, 5}, {0, 4}, occ));
  gens.push_back(Generator::scatterer({3, 6}, {1, 7}, occ));
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (i % 3 != 0 && i + 2 < gens.size())
      continue;
    INFO(gens[i].label());
    const auto psi = random_state(8, i);
    const double angle = 0.1 + 0.05 * static_cast<double>(i % 7);
    const Eigen::MatrixXcd u = (angle * oracle::dense_generator(gens[i], 8).to_dense()).exp();
    const Eigen::VectorXcd expect = u * as_vector(psi);
    const auto got = apply_exponential(psi, gens[i], angle);
    CHECK((as_vector(got) - expect).norm() < 1e-12);
  }
}

TEST_CASE("exponential identities", "[simulator]") {
  const auto g = Generator::excitation({0, 4}, {2, 6});
  const auto psi = random_state(8, 3);
  CHECK(apply_exponential(psi, g, 0.0) == psi);
  const auto back = apply_exponential(apply_exponential(psi, g, 0.7), g, -0.7);
  CHECK((as_vector(back) - as_vector(psi)).norm() < 1e-12);
}

TEST_CASE("H2 double excitation at pi/2 swaps the determinants", "[simulator]") {
  const auto occ = make_indexing(2, {0, 2});
  const auto g = Generator::excitation({0, 2}, {1, 3});
  const auto out = apply_exponential(prepare_reference(occ), g, std::numbers::pi / 2);
  CHECK_THAT(std::abs(out[0b1010]), WithinAbs(1.0, 1e-12));
  CHECK_THAT(std::abs(out[0b0101]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("dense fallback for non-commuting images", "[simulator]") {
  PauliSum k(3);
  k.add(parse_axes("XII"), cplx{0, 0.3});
  k.add(parse_axes("ZII"), cplx{0, 0.7});
  k.add(parse_axes("IYZ"), cplx{0, -0.2});
  const auto cg = compile_pauli_generator(k, 3);
  CHECK_FALSE(cg.commuting);
  REQUIRE(cg.dense);
  auto psi = random_state(3, 5);
  const Eigen::VectorXcd expect =
      (0.9 * oracle::dense_from_pauli(k).to_dense()).exp() * as_vector(psi);
  apply_exponential(psi, cg, 0.9);
  CHECK((as_vector(psi) - expect).norm() < 1e-12);

  PauliSum big(12);
  big.add(parse_axes("XIIIIIIIIIII"), cplx{0, 1});
  big.add(parse_axes("ZIIIIIIIIIII"), cplx{0, 1});
  CHECK_THROWS_AS(compile_pauli_generator(big, 12), NonCommutingError);
}

TEST_CASE("generator action", "[simulator]") {
  const auto g = Generator::excitation({1}, {3});
  auto psi = random_state(4, 2);
  const Eigen::VectorXcd expect = oracle::dense_generator(g, 4).to_dense() * as_vector(psi);
  apply_generator(psi, compile_generator(g, 4));
  CHECK((as_vector(psi) - expect).norm() < 1e-13);
}

TEST_CASE("ansatz application", "[simulator]") {
  const auto occ = make_indexing(4, {0, 1, 4, 5});
  const auto pool = build_conventional(occ, 2);
  const auto ref = prepare_reference(occ);
  std::vector<double> zeros(pool.size(), 0.0);
  CHECK(apply_ansatz(ref, pool, zeros) == ref);
  std::vector<double> wrong(pool.size() + 1, 0.0);
  CHECK_THROWS_AS(apply_ansatz(ref, pool, wrong), ArityError);

  OrderedAnsatz one;
  const auto g = pool.factors().front().generator;
  one.append({g});
  const std::vector<double> p{0.3};
  CHECK(apply_ansatz(ref, one, p) == apply_exponential(ref, g, 0.3));

  // first listed factor acts first
  OrderedAnsatz two;
  const auto g2 = pool.factors().back().generator;
  two.append({g});
  two.append({g2});
  const std::vector<double> p2{0.3, 0.5};
  CHECK(apply_ansatz(ref, two, p2) ==
        apply_exponential(apply_exponential(ref, g, 0.3), g2, 0.5));
}

TEST_CASE("norm is preserved over many factors", "[simulator][property]") {
  const auto occ = make_indexing(5, {0, 1, 5, 6});
  const auto pool = build_conventional(occ, 3);
  const CompiledAnsatz compiled(pool, 10);
  auto psi = prepare_reference(occ);
  Rng rng(17);
  std::uniform_real_distribution<double> angle(-1.0, 1.0);
  int applied = 0;
  while (applied < 10000)
    for (std::size_t i = 0; i < compiled.size() && applied < 10000; ++i, ++applied)
      apply_exponential(psi, compiled[i], angle(rng));
  CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
}

TEST_CASE("expectation values", "[simulator]") {
  Rng rng(1);
  SECTION("constant operator in every mode") {
    const auto c = PauliSum::identity(3, 0.42);
    const auto psi = random_state(3, 1);
    for (auto mode : {NoiseMode::noiseless, NoiseMode::shot_gaussian, NoiseMode::trajectory}) {
      NoiseConfig nc;
      nc.mode = mode;
      nc.p_readout = 0.1;
      CHECK_THAT(expectation(psi, c, nc, rng), WithinAbs(0.42, 1e-14));
    }
  }
  SECTION("HF energy of H2") {
    const auto ints = testing::load("h2_0.735");
    const auto occ = make_indexing(ints);
    const auto h = jw_hamiltonian(ints, occ);
    const double e = expectation(prepare_reference(occ), h, NoiseConfig{}, rng);
    CHECK_THAT(e, WithinAbs(oracle::matrix_element(ints, occ.reference(), occ.reference()),
                            1e-12));
    CHECK_THAT(e, WithinAbs(testing::manifest()["h2_0.735"]["pyscf_hf_energy"].get<double>(),
                            1e-8));
  }
  SECTION("shot noise is reproducible and scaled by the variance") {
    const auto ints = testing::load("h2_0.735");
    const auto occ = make_indexing(ints);
    const Observable h(jw_hamiltonian(ints, occ));
    const auto psi = apply_exponential(prepare_reference(occ),
                                       Generator::excitation({0, 2}, {1, 3}), 0.3);
    NoiseConfig nc;
    nc.mode = NoiseMode::shot_gaussian;
    nc.shots = 100;
    Rng r1(5), r2(5);
    const double a = expectation(psi, h, nc, r1), b = expectation(psi, h, nc, r2);
    CHECK(a == b);
    const auto [m, m2] = h.moments(psi, false);
    std::vector<double> draws;
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < 4000; ++i)
      draws.push_back(expectation(psi, h, nc, r1));
    for (double d : draws)
      mean += d / draws.size();
    for (double d : draws)
      var += (d - mean) * (d - mean) / (draws.size() - 1);
    const double expected_var = (m2 - m * m) / nc.shots;
    CHECK_THAT(mean, WithinAbs(m, 5 * std::sqrt(expected_var / draws.size())));
    CHECK(var == Catch::Approx(expected_var).epsilon(0.1));
  }
  SECTION("non-hermitian observable") {
    PauliSum bad(2);
    bad.add(parse_axes("XI"), cplx{0, 1});
    CHECK_THROWS_AS(Observable(bad), HermiticityError);
  }
}

TEST_CASE("basis probabilities", "[simulator]") {
  CHECK(basis_probabilities(Statevector::basis(3, 5), 0.0) ==
        std::vector<Configuration>{{5, 1.0}});
  Statevector u(2);
  for (auto &a : u.amplitudes())
    a = 0.5;
  CHECK(basis_probabilities(u, 0.3).empty());
  const auto r = random_state(5, 4);
  const auto all = basis_probabilities(r, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    total += all[i].probability;
    if (i > 0)
      CHECK(all[i - 1].probability >= all[i].probability);
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-12));
}

TEST_CASE("readout sampling", "[simulator]") {
  Rng rng(3);
  NoiseConfig nc;
  nc.shots = 100;
  const auto h = sample_readout(Statevector::basis(3, 0b101), nc, rng);
  CHECK(h == Histogram{{0b101, 100}});
  nc.p_readout = 1.0;
  CHECK(sample_readout(Statevector(1), nc, rng) == Histogram{{1, 100}});
  nc.p_readout = 0.1;
  nc.shots = 100000;
  const auto flips = sample_readout(Statevector(1), nc, rng);
  CHECK_THAT(static_cast<double>(flips.at(1)) / nc.shots, WithinAbs(0.1, 0.01));
  CHECK(histogram_csv(Histogram{{0b01, 3}, {0b10, 4}}, 2) == "bitstring,count\n10,3\n01,4\n");
}

TEST_CASE("CNOT cost", "[simulator][cost]") {
  CHECK(cnot_cost(OrderedAnsatz{}, 4).cnot_count == 0);
  OrderedAnsatz one;
  one.append({Generator::excitation({0}, {1})});
  const auto c = cnot_cost(one, 4);
  CHECK(c.cnot_count == 4);
  // two strings: 2 basis changes per X/Y letter (2 letters) + 1 rotation each
  CHECK(c.single_qubit_count == 10);
  const auto pool = build_conventional(make_indexing(4, {0, 1, 4, 5}), 3);
  const auto report = cnot_cost(pool, 8);
  int sum = 0, sum1 = 0;
  for (const auto &f : report.factors) {
    sum += f.cnots;
    sum1 += f.single_qubit;
  }
  CHECK(sum == report.cnot_count);
  CHECK(sum1 == report.single_qubit_count);
  const auto j = to_json(report);
  CHECK(j["cnot_count"] == report.cnot_count);
  CHECK(j["factors"].size() == pool.size());
}

TEST_CASE("noisy estimator", "[simulator][noise]") {
  const auto ints = testing::load("h4_1.0");
  const auto occ = make_indexing(ints);
  const auto h = jw_hamiltonian(ints, occ);
  const auto pool = build_conventional(occ, 2);
  const CompiledAnsatz compiled(pool, occ.n_spin);
  std::vector<double> params(pool.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    params[i] = 0.05 * std::sin(static_cast<double>(i));

  NoiseConfig quiet;
  NoisyEstimator exact(h, compiled, prepare_reference(occ), quiet);
  const double e0 = exact(params);

  SECTION("one noiseless trajectory is bit-identical") {
    NoiseConfig nc;
    nc.mode = NoiseMode::trajectory;
    NoisyEstimator est(h, compiled, prepare_reference(occ), nc);
    CHECK(est(params) == e0);
  }
  SECTION("seeded runs repeat") {
    for (auto mode : {NoiseMode::shot_gaussian, NoiseMode::trajectory}) {
      NoiseConfig nc;
      nc.mode = mode;
      nc.p1 = 1e-3;
      nc.p2 = 1e-2;
      nc.p_readout = 1e-2;
      nc.trajectories = 3;
      nc.seed = 99;
      NoisyEstimator a(h, compiled, prepare_reference(occ), nc);
      NoisyEstimator b(h, compiled, prepare_reference(occ), nc);
      const double ea = a(params);
      CHECK(ea == b(params));
      CHECK(ea != e0);
    }
  }
  SECTION("global depolarizing pulls towards the maximally mixed value") {
    NoiseConfig nc;
    nc.mode = NoiseMode::shot_gaussian;
    nc.p2 = 0.01;
    nc.shots = 1000000000;
    NoisyEstimator est(h, compiled, prepare_reference(occ), nc);
    const double f = circuit_fidelity(est.cost(), nc);
    CHECK(f < 1.0);
    CHECK_THAT(est(params), WithinAbs(f * e0 + (1 - f) * h.constant().real(), 1e-3));
  }
  SECTION("trajectory average tracks the noise-free value for weak noise") {
    NoiseConfig nc;
    nc.mode = NoiseMode::trajectory;
    nc.p2 = 1e-5;
    nc.trajectories = 20;
    NoisyEstimator est(h, compiled, prepare_reference(occ), nc);
    CHECK_THAT(est(params), WithinAbs(e0, 0.05));
  }
  SECTION("invalid configuration") {
    NoiseConfig nc;
    nc.p1 = 1.5;
    CHECK_THROWS_AS(NoisyEstimator(h, compiled, prepare_reference(occ), nc), ConfigError);
    CHECK(parse_noise_mode("shot-gaussian") == NoiseMode::shot_gaussian);
    CHECK_THROWS_AS(parse_noise_mode("thermal"), ConfigError);
  }
}

TEST_CASE("Rayleigh-Ritz bound on random ansatz states", "[simulator][property]") {
  const auto ints = testing::load("h4_1.0");
  const auto occ = make_indexing(ints);
  const Observable h(jw_hamiltonian(ints, occ));
  const double fci = oracle::fci_ground(ints, occ).energy;
  const auto pool = build_conventional(occ, 2);
  const CompiledAnsatz compiled(pool, 8);
  Rng rng(2);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(pool.size());
    for (auto &x : p)
      x = angle(rng);
    auto psi = prepare_reference(occ);
    apply_ansatz(psi, compiled, p);
    CHECK(h.value(psi) >= fci - 1e-9);
  }
}

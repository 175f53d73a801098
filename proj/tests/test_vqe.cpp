// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>

#include "rbmducc/error.hpp"
#include "rbmducc/jordan_wigner.hpp"
#include "rbmducc/oracle.hpp"
#include "rbmducc/vqe.hpp"
#include "support.hpp"

using namespace rbmducc;
using Catch::Matchers::WithinAbs;

namespace {

struct System {
  MolecularIntegrals ints;
  SpinOrbitalIndexing occ;
  ObjectiveSpec spec;
  double fci = 0.0;
  double hf = 0.0;
};

System make_system(const std::string &id, bool conventional = false) {
  System s{testing::load(id), {}, {}, 0.0, 0.0};
  s.occ = make_indexing(s.ints);
  const PerturbationModel model(s.ints, s.occ);
  s.spec.hamiltonian = jw_hamiltonian(s.ints, s.occ);
  s.spec.ansatz = conventional ? build_conventional(s.occ, 2) : build_duccsd_pool(model, 1e-5);
  s.spec.reference = prepare_reference(s.occ);
  s.fci = oracle::fci_ground(s.ints, s.occ).energy;
  s.hf = oracle::matrix_element(s.ints, s.occ.reference(), s.occ.reference());
  return s;
}

std::vector<double> random_params(std::size_t n, std::uint64_t seed, double scale) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> x(n);
  for (auto &v : x)
    v = u(rng);
  return x;
}

Objective quadratic(std::size_t n) {
  return Objective(
      [](std::span<const double> x) {
        double s = 1.0;
        for (double v : x)
          s += (v - 1.0) * (v - 1.0);
        return s;
      },
      n);
}

} // namespace

TEST_CASE("evaluate", "[vqe]") {
  const auto h2 = make_system("h2_0.735");
  const std::vector<double> zero(h2.spec.ansatz.size(), 0.0);
  CHECK_THAT(evaluate(h2.spec, zero), WithinAbs(h2.hf, 1e-12));

  SECTION("oracle-optimal double angle reaches FCI") {
    // Only the double couples to the ground state of H2 by symmetry.
    const auto slot = h2.spec.ansatz.find(Generator::excitation({0, 2}, {1, 3}));
    REQUIRE(slot);
    const auto fci = oracle::fci_ground(h2.ints, h2.occ);
    const Bits ref = h2.occ.reference(), dbl = 0b1010;
    const auto k = oracle::dense_generator(h2.spec.ansatz[*slot].generator, 4).to_dense();
    const double sign = k(dbl, ref).real();
    REQUIRE(std::abs(sign) == 1.0);
    std::vector<double> x = zero;
    x[*slot] = std::atan2(sign * fci.vector[dbl].real(), fci.vector[ref].real());
    CHECK_THAT(evaluate(h2.spec, x), WithinAbs(h2.fci, 1e-9));
  }

  SECTION("Rayleigh-Ritz bound and determinism") {
    const auto h4 = make_system("h4_1.0");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto x = random_params(h4.spec.ansatz.size(), seed, 1.0);
      const double e = evaluate(h4.spec, x);
      CHECK(e >= h4.fci - 1e-9);
      CHECK(evaluate(h4.spec, x) == e);
    }
  }
  CHECK_THROWS_AS(evaluate(h2.spec, std::vector<double>{0.0}), ArityError);
}

TEST_CASE("adjoint gradient matches central differences", "[vqe][gradient]") {
  for (const auto *id : {"h2_0.735", "h4_1.0", "bh_2.25"}) {
    const auto s = make_system(id);
    const Objective obj(s.spec);
    const auto x = random_params(obj.n_params(), 3, 0.3);
    const auto [fa, ga] = obj.value_and_gradient(x, GradientMethod::adjoint);
    const auto [ff, gf] = obj.value_and_gradient(x, GradientMethod::finite_difference, 1e-6);
    CHECK(fa == ff);
    for (std::size_t k = 0; k < ga.size(); ++k)
      CHECK_THAT(ga[k], WithinAbs(gf[k], 1e-7));
  }
}

TEST_CASE("conjugate gradient", "[vqe][cg]") {
  SECTION("quadratic hook") {
    auto obj = quadratic(3);
    const std::vector<double> x0{0.0, 0.0, 0.0};
    const auto r = minimize_cg(obj, x0, {.tol = 1e-10});
    CHECK(r.converged);
    CHECK_THAT(r.best_energy, WithinAbs(1.0, 1e-8));
    for (double v : r.best_params)
      CHECK_THAT(v, WithinAbs(1.0, 1e-6));
    CHECK(r.trajectory.size() == static_cast<std::size_t>(r.evaluations));
  }
  SECTION("max_iter = 0 returns the initial evaluation") {
    auto obj = quadratic(2);
    const std::vector<double> x0{0.5, 0.0};
    const auto r = minimize_cg(obj, x0, {.max_iter = 0});
    CHECK(r.evaluations == 1);
    CHECK(r.best_energy == 1.25 + 1.0);
    CHECK(r.final_params == x0);
  }
  SECTION("H2 dUCCSD from zero reaches FCI") {
    const auto h2 = make_system("h2_0.735");
    const std::vector<double> zero(h2.spec.ansatz.size(), 0.0);
    for (auto method : {GradientMethod::adjoint, GradientMethod::finite_difference}) {
      const auto r = minimize_cg(h2.spec, zero, {.tol = 1e-7, .gradient = method});
      CHECK_THAT(r.best_energy, WithinAbs(h2.fci, 1e-8));
      CHECK(r.best_energy <= r.trajectory.front().energy);
    }
  }
  SECTION("H4 never rises above the initial evaluation") {
    const auto h4 = make_system("h4_1.0");
    const auto x0 = random_params(h4.spec.ansatz.size(), 9, 0.2);
    const auto r = minimize_cg(h4.spec, x0, {.max_iter = 30});
    CHECK(r.best_energy <= r.trajectory.front().energy);
    CHECK(r.final_energy == r.best_energy);
    CHECK(r.best_energy >= h4.fci - 1e-9);
    double lowest = r.trajectory.front().energy;
    for (const auto &p : r.trajectory)
      lowest = std::min(lowest, p.energy);
    CHECK(lowest == r.best_energy);
  }
  SECTION("noisy objectives are rejected") {
    auto h2 = make_system("h2_0.735");
    h2.spec.noise.mode = NoiseMode::shot_gaussian;
    const std::vector<double> zero(h2.spec.ansatz.size(), 0.0);
    CHECK_THROWS_AS(minimize_cg(h2.spec, zero), ModeError);
  }
}

TEST_CASE("SPSA", "[vqe][spsa]") {
  SECTION("noiseless quadratic") {
    auto obj = quadratic(4);
    const std::vector<double> x0(4, 0.0);
    const auto r = minimize_spsa(obj, x0, {.max_iter = 500, .seed = 17});
    CHECK_THAT(r.final_energy, WithinAbs(1.0, 1e-3));
    CHECK(r.evaluations == 2 * 500 + 2 * 10 + 1);
    CHECK(r.trajectory.size() == static_cast<std::size_t>(r.evaluations));
  }
  SECTION("max_iter = 0") {
    auto obj = quadratic(2);
    const std::vector<double> x0{0.0, 0.0};
    const auto r = minimize_spsa(obj, x0, {.max_iter = 0});
    CHECK(r.evaluations == 1);
    CHECK(r.final_energy == 3.0);
  }
  SECTION("identical seeds give identical noisy trajectories") {
    auto h2 = make_system("h2_0.735");
    h2.spec.noise = {.p1 = 1e-3, .p2 = 1e-2, .p_readout = 1e-2, .shots = 1000,
                     .mode = NoiseMode::shot_gaussian, .seed = 4};
    const std::vector<double> zero(h2.spec.ansatz.size(), 0.0);
    const auto a = minimize_spsa(h2.spec, zero, {.max_iter = 50, .seed = 2});
    const auto b = minimize_spsa(h2.spec, zero, {.max_iter = 50, .seed = 2});
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); ++i)
      CHECK(a.trajectory[i].energy == b.trajectory[i].energy);
    CHECK(a.final_params == b.final_params);
    h2.spec.noise.seed = 5;
    const auto c = minimize_spsa(h2.spec, zero, {.max_iter = 50, .seed = 2});
    CHECK(c.final_params != a.final_params);
  }
  SECTION("H2 with 10^4 shots lands within 5 mHa of FCI on average") {
    auto h2 = make_system("h2_0.735");
    const std::vector<double> zero(h2.spec.ansatz.size(), 0.0);
    double mean = 0.0;
    const int runs = 20;
    for (int run = 0; run < runs; ++run) {
      h2.spec.noise = {.shots = 10000, .mode = NoiseMode::shot_gaussian,
                       .seed = derive_seed(77, static_cast<std::uint64_t>(run))};
      Objective obj(h2.spec);
      const auto r = minimize_spsa(
          obj, zero, {.max_iter = 500, .seed = derive_seed(78, static_cast<std::uint64_t>(run))});
      mean += obj.exact(r.final_params) / runs;
    }
    CHECK(mean - h2.fci < 5e-3);
    CHECK(mean >= h2.fci - 1e-9);
  }
}

TEST_CASE("optimizer output", "[vqe][io]") {
  auto obj = quadratic(1);
  const std::vector<double> x0{0.0};
  const auto r = minimize_cg(obj, x0);
  const auto j = nlohmann::json::parse(to_json(r).dump());
  CHECK(j["optimizer"] == "cg");
  CHECK(j["trajectory"].size() == r.trajectory.size());
  const auto csv = trajectory_csv(r);
  CHECK(csv.rfind("eval_index,energy_hartree\n0,2\n", 0) == 0);
  CHECK(static_cast<std::int64_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        r.evaluations + 1);
  CHECK(parse_gradient_method("fd") == GradientMethod::finite_difference);
  CHECK_THROWS_AS(parse_gradient_method("newton"), ConfigError);
}

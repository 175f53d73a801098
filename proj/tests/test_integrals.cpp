// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rbmducc/error.hpp"
#include "rbmducc/integrals.hpp"
#include "rbmducc/oracle.hpp"
#include "support.hpp"

using namespace rbmducc;
using Catch::Matchers::WithinAbs;

namespace {

const char *kMinimal = " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n"
                       "  0.5 1 1 1 1\n -1.0 1 1 0 0\n  0.7 0 0 0 0\n";

} // namespace

TEST_CASE("minimal file maps fields directly", "[integrals][parse]") {
  const auto ints = parse_fcidump_text(kMinimal);
  CHECK(ints.n_spatial() == 1);
  CHECK(ints.n_electrons() == 2);
  CHECK(ints.h2(0, 0, 0, 0) == 0.5);
  CHECK(ints.h1(0, 0) == -1.0);
  CHECK(ints.core_energy() == 0.7);
  CHECK_FALSE(ints.orbital_energies().has_value());
}

TEST_CASE("header keys in any order, slash terminator, Fortran exponents",
          "[integrals][parse]") {
  const auto ints = parse_fcidump_text("&FCI MS2=0, NELEC=2, NORB=2 /\n"
                                       "0.25D+00 2 1 2 1\n-0.5d0 2 2 0 0\n");
  CHECK(ints.n_spatial() == 2);
  CHECK(ints.h1(1, 1) == -0.5);
  CHECK(ints.h2(1, 0, 1, 0) == 0.25);
  CHECK(ints.h2(0, 1, 0, 1) == 0.25);
}

TEST_CASE("parse errors", "[integrals][parse]") {
  CHECK_THROWS_AS(parse_fcidump_text("&FCI NELEC=2 &END\n0.1 1 1 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_fcidump_text("no header here\n"), ParseError);
  CHECK_THROWS_AS(parse_fcidump_text("&FCI NORB=1,NELEC=2 &END\n0.1 2 1 1 1\n"),
                  IndexError);
  CHECK_THROWS_AS(parse_fcidump_text("&FCI NORB=2,NELEC=2 &END\n0.1 1 1 2 2\n0.2 2 2 1 1\n"),
                  ConsistencyError);
  CHECK_NOTHROW(parse_fcidump_text("&FCI NORB=2,NELEC=2 &END\n0.1 1 1 2 2\n0.1 2 2 1 1\n"));
  CHECK_THROWS_AS(parse_fcidump("/nonexistent/file.fcidump"), Error);
}

TEST_CASE("bundled H2 header", "[integrals][assets]") {
  const auto ints = testing::load("h2_0.735");
  CHECK(ints.n_spatial() == 2);
  CHECK(ints.n_electrons() == 2);
  CHECK(ints.ms2() == 0);
  REQUIRE(ints.orbital_energies().has_value());
}

TEST_CASE("every bundled asset matches its manifest and is symmetric", "[integrals][assets]") {
  for (const auto &id : testing::asset_ids()) {
    INFO(id);
    const auto ints = testing::load(id);
    const auto &m = testing::manifest()[id];
    CHECK(ints.n_spatial() == m["n_spatial"].get<int>());
    CHECK(ints.n_electrons() == m["n_electrons"].get<int>());
    CHECK(ints.n_electrons() <= 2 * ints.n_spatial());
    CHECK(ints.symmetry_violation() <= 1e-12);
  }
}

TEST_CASE("serialize then parse is bit exact", "[integrals][roundtrip]") {
  for (const auto &id : {"h2_0.735", "h4_1.0", "bh_2.25", "ch2_1.4"}) {
    INFO(id);
    const auto a = testing::load(id);
    const auto b = parse_fcidump_text(serialize_fcidump(a));
    CHECK(a == b);
  }
}

TEST_CASE("8-fold images agree", "[integrals][symmetry]") {
  const auto ints = testing::load("h4_1.0");
  const int n = ints.n_spatial();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = ints.h2(p, q, r, s);
          CHECK(ints.h2(q, p, r, s) == v);
          CHECK(ints.h2(p, q, s, r) == v);
          CHECK(ints.h2(r, s, p, q) == v);
          CHECK(ints.h2(s, r, q, p) == v);
        }
}

TEST_CASE("aufbau indexing", "[integrals][indexing]") {
  const auto ints = testing::load("bh_2.25");
  const auto occ = make_indexing(ints);
  CHECK(occ.n_spin == 10);
  CHECK(occ.occupied == std::vector<int>{0, 1, 5, 6});
  CHECK(occ.virtuals.size() == 6);
  CHECK(occ.ms2() == 0);

  const auto explicit_occ = make_indexing(3, {0, 3});
  CHECK(explicit_occ.virtuals == std::vector<int>{1, 2, 4, 5});
}

TEST_CASE("Fock diagonal matches orbital energy lines", "[integrals][fock]") {
  for (const auto &id : {"h2_0.735", "h4_1.0", "bh_2.25", "h2o_0.96", "ch2_1.1"}) {
    INFO(id);
    const auto ints = testing::load(id);
    const auto occ = make_indexing(ints);
    const auto f = fock_diagonal(ints, occ);
    const auto &orbe = *ints.orbital_energies();
    for (int p = 0; p < occ.n_spin; ++p)
      CHECK_THAT(f[static_cast<std::size_t>(p)],
                 WithinAbs(orbe[static_cast<std::size_t>(p % ints.n_spatial())], 1e-8));
  }
}

TEST_CASE("Fock diagonal trivial cases", "[integrals][fock]") {
  MolecularIntegrals ints(3, 0, 0);
  ints.set_h1(0, 0, -1.0);
  ints.set_h1(1, 1, 0.5);
  ints.set_h1(2, 2, 2.0);
  const auto empty = make_indexing(3, {});
  const auto f0 = fock_diagonal(ints, empty);
  CHECK(f0[1] == 0.5);
  CHECK(f0[5] == 2.0);
  const auto one = make_indexing(3, {0});
  const auto f1 = fock_diagonal(ints, one);
  CHECK(f1[0] == -1.0);
  CHECK(f1[2] == 2.0);
}

TEST_CASE("MP2 amplitude symmetry and spin selection", "[integrals][mp2]") {
  const auto ints = testing::load("h4_1.0");
  const auto occ = make_indexing(ints);
  const PerturbationModel model(ints, occ);
  // occupied {0,1,4,5}, virtual {2,3,6,7}
  const double t = model.amplitude(0, 4, 2, 6);
  CHECK(t != 0.0);
  CHECK(model.amplitude(4, 0, 2, 6) == -t);
  CHECK(model.amplitude(0, 4, 6, 2) == -t);
  CHECK(model.amplitude(4, 0, 6, 2) == t);
  // alpha,beta -> alpha,alpha changes Sz
  CHECK(model.amplitude(0, 4, 2, 3) == 0.0);
  CHECK(mp2_amplitude(ints, occ, 0, 4, 2, 6) == t);
}

TEST_CASE("MP2 amplitude equals oracle matrix-element quotient on H2", "[integrals][mp2]") {
  const auto ints = testing::load("h2_0.735");
  const auto occ = make_indexing(ints);
  const Bits ref = occ.reference();
  const Bits d = ref ^ bit(0) ^ bit(2) ^ bit(1) ^ bit(3);
  const auto eps = *ints.orbital_energies();
  // <D|H|Phi0> with D = a+_1 a+_3 a_2 a_0 |Phi0>; sign from the ladder algebra
  double sign = 1.0;
  Bits k = ref;
  for (auto [p, cre] : {std::pair{0, false}, {2, false}, {3, true}, {1, true}}) {
    auto r = oracle::ladder(k, p, cre);
    REQUIRE(r);
    k = r->first;
    sign *= r->second;
  }
  REQUIRE(k == d);
  const double elem = oracle::matrix_element(ints, d, ref) * sign;
  const double quotient = elem / (2 * eps[0] - 2 * eps[1]);
  CHECK_THAT(mp2_amplitude(ints, occ, 0, 2, 1, 3), WithinAbs(quotient, 1e-12));
}

TEST_CASE("degenerate denominators raise", "[integrals][mp2]") {
  MolecularIntegrals ints(2, 2, 0);
  ints.set_h2(0, 1, 0, 1, 0.1);
  ints.set_orbital_energies({0.0, 0.0});
  const auto occ = make_indexing(ints);
  CHECK_THROWS_AS(mp2_amplitude(ints, occ, 0, 2, 1, 3), DegeneracyError);
}

TEST_CASE("MP2 energy", "[integrals][mp2]") {
  SECTION("no two-electron integrals") {
    MolecularIntegrals ints(2, 2, 0);
    ints.set_h1(0, 0, -1.0);
    ints.set_h1(1, 1, 0.5);
    CHECK(mp2_energy(ints, make_indexing(ints)) == 0.0);
  }
  SECTION("H2 equals the single-double quotient") {
    const auto ints = testing::load("h2_0.735");
    const auto occ = make_indexing(ints);
    const auto eps = *ints.orbital_energies();
    const double g = ints.h2(0, 1, 0, 1);
    CHECK_THAT(mp2_energy(ints, occ), WithinAbs(g * g / (2 * eps[0] - 2 * eps[1]), 1e-12));
  }
  SECTION("all assets agree with the external reference and are non-positive") {
    for (const auto &id : testing::asset_ids()) {
      INFO(id);
      const auto ints = testing::load(id);
      const double e = mp2_energy(ints, make_indexing(ints));
      CHECK(e <= 0.0);
      CHECK_THAT(e, WithinAbs(testing::manifest()[id]["pyscf_mp2_correlation"].get<double>(),
                              1e-8));
    }
  }
}

TEST_CASE("forced Fock recompute agrees with file energies", "[integrals][mp2]") {
  const auto ints = testing::load("bh_2.25");
  const auto occ = make_indexing(ints);
  const PerturbationModel a(ints, occ, false), b(ints, occ, true);
  CHECK_THAT(a.energy(), WithinAbs(b.energy(), 1e-8));
  auto stripped = ints;
  stripped.clear_orbital_energies();
  CHECK_THAT(mp2_energy(stripped, make_indexing(stripped)), WithinAbs(a.energy(), 1e-8));
}

// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/generator.hpp"

#include <algorithm>
#include <functional>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rbmducc/error.hpp"

namespace rbmducc {

namespace {

bool has_repeats(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

} // namespace

Generator Generator::excitation(std::vector<int> holes, std::vector<int> particles) {
  if (holes.size() != particles.size() || holes.empty())
    throw InvalidGeneratorError("excitation needs equal, nonzero hole and particle counts");
  std::vector<int> all = holes;
  all.insert(all.end(), particles.begin(), particles.end());
  if (has_repeats(all))
    throw InvalidGeneratorError("excitation indices must be distinct");
  std::sort(holes.begin(), holes.end());
  std::sort(particles.begin(), particles.end());
  Generator g;
  g.kind_ = GeneratorKind::excitation;
  g.creations_ = std::move(particles);
  g.destructions_ = std::move(holes);
  return g;
}

Generator Generator::scatterer(std::vector<int> creations, std::vector<int> destructions,
                               const SpinOrbitalIndexing &occ) {
  if (creations.size() != 2 || destructions.size() != 2)
    throw InvalidGeneratorError("scatterer needs two creations and two destructions");
  std::vector<int> all = creations;
  all.insert(all.end(), destructions.begin(), destructions.end());
  if (has_repeats(all))
    throw InvalidGeneratorError("scatterer indices must be distinct");
  for (int p : all)
    if (p < 0 || p >= occ.n_spin)
      throw InvalidGeneratorError("scatterer index out of range");
  if (occ.spin(creations[0]) + occ.spin(creations[1]) !=
      occ.spin(destructions[0]) + occ.spin(destructions[1]))
    throw InvalidGeneratorError("scatterer does not conserve Sz");
  const auto occd = [&](int p) { return occ.is_occupied(p); };
  Generator g;
  g.kind_ = GeneratorKind::scatterer;
  if (occd(destructions[0]) && occd(destructions[1])) {
    // a_c^+ a_l^+ a_i a_k: one virtual and one occupied creation.
    if (occd(creations[0]) == occd(creations[1]))
      throw InvalidGeneratorError("occupied-transition scatterer needs one virtual and "
                                  "one occupied creation");
    if (occd(creations[0]))
      std::swap(creations[0], creations[1]);
    std::sort(destructions.begin(), destructions.end());
    g.pattern_ = ScattererPattern::occupied_transition;
  } else {
    // a_c^+ a_b^+ a_e a_k: two virtual creations, occupied k, virtual e.
    if (occd(creations[0]) || occd(creations[1]))
      throw InvalidGeneratorError("virtual-transition scatterer needs virtual creations");
    if (occd(destructions[0]) == occd(destructions[1]))
      throw InvalidGeneratorError("virtual-transition scatterer needs one occupied and "
                                  "one virtual destruction");
    if (!occd(destructions[0]))
      std::swap(destructions[0], destructions[1]);
    std::sort(creations.begin(), creations.end());
    g.pattern_ = ScattererPattern::virtual_transition;
  }
  g.creations_ = std::move(creations);
  g.destructions_ = std::move(destructions);
  return g;
}

int Generator::span() const noexcept {
  int m = -1;
  for (int p : creations_)
    m = std::max(m, p);
  for (int p : destructions_)
    m = std::max(m, p);
  return m + 1;
}

std::optional<Bits> Generator::apply_to(Bits reference) const noexcept {
  Bits k = reference;
  for (int p : destructions_) {
    if (!test_bit(k, p))
      return std::nullopt;
    k &= ~bit(p);
  }
  for (int p : creations_) {
    if (test_bit(k, p))
      return std::nullopt;
    k |= bit(p);
  }
  return k;
}

std::string Generator::label() const {
  std::string tag;
  if (kind_ == GeneratorKind::scatterer)
    tag = pattern_ == ScattererPattern::occupied_transition ? "Socc" : "Svir";
  else
    tag = std::string(1, "SDTQ"[std::min<std::size_t>(creations_.size(), 4) - 1]);
  return fmt::format("{}({}->{})", tag, fmt::join(destructions_, ","),
                     fmt::join(creations_, ","));
}

void Generator::validate(const SpinOrbitalIndexing &occ) const {
  for (const auto *list : {&creations_, &destructions_})
    for (int p : *list)
      if (p < 0 || p >= occ.n_spin)
        throw InvalidGeneratorError("generator index out of range: " + label());
  std::vector<int> all = creations_;
  all.insert(all.end(), destructions_.begin(), destructions_.end());
  if (has_repeats(all))
    throw InvalidGeneratorError("generator indices must be distinct: " + label());
  int sz = 0;
  for (int p : creations_)
    sz += occ.spin(p) == 0 ? 1 : -1;
  for (int p : destructions_)
    sz -= occ.spin(p) == 0 ? 1 : -1;
  if (sz != 0)
    throw InvalidGeneratorError("generator does not conserve Sz: " + label());
  if (kind_ == GeneratorKind::excitation) {
    for (int p : creations_)
      if (occ.is_occupied(p))
        throw InvalidGeneratorError("excitation creates into an occupied orbital: " + label());
    for (int p : destructions_)
      if (!occ.is_occupied(p))
        throw InvalidGeneratorError("excitation destroys a virtual orbital: " + label());
  } else {
    // Rebuilding through the factory re-checks the pattern.
    (void)scatterer(creations_, destructions_, occ);
  }
}

std::vector<Generator> enumerate_excitations(const SpinOrbitalIndexing &occ, int rank) {
  std::vector<Generator> out;
  const auto &o = occ.occupied;
  const auto &v = occ.virtuals;
  std::vector<int> holes, parts;
  const auto spin_sum = [&](const std::vector<int> &idx) {
    int s = 0;
    for (int p : idx)
      s += occ.spin(p);
    return s;
  };
  std::function<void(std::size_t)> pick_parts;
  std::function<void(std::size_t)> pick_holes = [&](std::size_t start) {
    if (static_cast<int>(holes.size()) == rank) {
      pick_parts(0);
      return;
    }
    for (std::size_t x = start; x < o.size(); ++x) {
      holes.push_back(o[x]);
      pick_holes(x + 1);
      holes.pop_back();
    }
  };
  pick_parts = [&](std::size_t start) {
    if (static_cast<int>(parts.size()) == rank) {
      if (spin_sum(holes) == spin_sum(parts))
        out.push_back(Generator::excitation(holes, parts));
      return;
    }
    for (std::size_t x = start; x < v.size(); ++x) {
      parts.push_back(v[x]);
      pick_parts(x + 1);
      parts.pop_back();
    }
  };
  if (rank >= 1)
    pick_holes(0);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace rbmducc

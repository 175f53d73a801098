// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "rbmducc/error.hpp"
#include "rbmducc/jordan_wigner.hpp"

namespace rbmducc {

int excitation_rank(Bits config, Bits reference) {
  if (popcount(config) != popcount(reference))
    throw SectorError("configuration and reference differ in particle number");
  return popcount(reference & ~config);
}

// ---------------------------------------------------------------------------
// OrderedAnsatz
// ---------------------------------------------------------------------------

std::optional<std::size_t> OrderedAnsatz::find(const Generator &g) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].generator == g)
      return i;
  return std::nullopt;
}

std::size_t OrderedAnsatz::count_scatterers() const {
  return static_cast<std::size_t>(std::count_if(
      factors_.begin(), factors_.end(), [](const auto &f) { return f.generator.is_scatterer(); }));
}

std::size_t OrderedAnsatz::count_rank(int rank) const {
  return static_cast<std::size_t>(
      std::count_if(factors_.begin(), factors_.end(), [rank](const auto &f) {
        return !f.generator.is_scatterer() && f.generator.rank() == rank;
      }));
}

std::vector<std::size_t> OrderedAnsatz::scatterers_of(std::size_t double_slot) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].paired_double == double_slot)
      out.push_back(i);
  return out;
}

void OrderedAnsatz::validate_layout() const {
  bool in_singles = false;
  std::optional<std::size_t> current_double;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto &f = factors_[i];
    if (f.generator.is_scatterer()) {
      if (in_singles)
        throw PairingError("scatterer placed in the singles block");
      if (!f.paired_double || f.paired_double != current_double)
        throw PairingError("scatterer is not adjacent to its paired double");
      continue;
    }
    if (f.paired_double)
      throw PairingError("only scatterers carry a pairing");
    if (f.generator.rank() == 1) {
      in_singles = true;
    } else {
      if (in_singles)
        throw PairingError("higher-rank excitation after the singles block");
      current_double = f.generator.rank() == 2 ? std::optional<std::size_t>(i) : std::nullopt;
    }
  }
}

// ---------------------------------------------------------------------------
// Pools
// ---------------------------------------------------------------------------

OrderedAnsatz build_duccsd_pool(const PerturbationModel &model, double mp2_threshold) {
  const auto &occ = model.indexing();
  OrderedAnsatz ansatz;
  for (const auto &d : enumerate_excitations(occ, 2)) {
    const auto &h = d.destructions();
    const auto &p = d.creations();
    double t = 0.0;
    try {
      t = model.amplitude(h[0], h[1], p[0], p[1]);
    } catch (const DegeneracyError &e) {
      spdlog::warn("screening out {}: {}", d.label(), e.what());
      continue;
    }
    if (std::abs(t) > mp2_threshold)
      ansatz.append({d, 0.0, std::abs(t), std::nullopt});
  }
  for (const auto &s : enumerate_excitations(occ, 1))
    ansatz.append({s, 0.0, 0.0, std::nullopt});
  return ansatz;
}

OrderedAnsatz build_conventional(const SpinOrbitalIndexing &occ, int max_rank) {
  OrderedAnsatz ansatz;
  std::vector<int> ranks;
  if (max_rank >= 2)
    ranks.push_back(2);
  for (int r = 3; r <= max_rank; ++r)
    ranks.push_back(r);
  ranks.push_back(1);
  for (int r : ranks)
    for (auto &g : enumerate_excitations(occ, r))
      ansatz.append({std::move(g), 0.0, 0.0, std::nullopt});
  return ansatz;
}

OrderedAnsatz reorder_by_probability(const OrderedAnsatz &ansatz,
                                     std::span<const Configuration> configs, Bits reference,
                                     const ReorderOptions &options) {
  std::map<Bits, double> prob;
  for (const auto &c : configs)
    prob[c.bits] += c.probability;

  std::map<Bits, const Generator *> reached;
  std::vector<AnsatzFactor> doubles, singles;
  for (const auto &f : ansatz.factors()) {
    const auto &g = f.generator;
    if (g.is_scatterer() || g.rank() > 2)
      throw PairingError("probability reordering expects a singles/doubles ansatz");
    const auto det = g.apply_to(reference);
    if (!det)
      throw AmbiguityError("generator " + g.label() + " annihilates the reference");
    if (auto [it, fresh] = reached.emplace(*det, &g); !fresh)
      throw AmbiguityError("generators " + it->second->label() + " and " + g.label() +
                           " reach the same determinant");
    AnsatzFactor out = f;
    const auto it = prob.find(*det);
    out.probability = it == prob.end() ? 0.0 : it->second;
    const bool screened = g.rank() == 2 || options.screen_singles;
    if (screened && out.probability < options.prob_threshold)
      continue;
    (g.rank() == 2 ? doubles : singles).push_back(std::move(out));
  }
  const auto by_probability = [](const AnsatzFactor &a, const AnsatzFactor &b) {
    if (a.probability != b.probability)
      return a.probability > b.probability;
    return a.generator < b.generator;
  };
  std::sort(doubles.begin(), doubles.end(), by_probability);
  std::sort(singles.begin(), singles.end(), by_probability);
  OrderedAnsatz out;
  for (auto &f : doubles)
    out.append(std::move(f));
  for (auto &f : singles)
    out.append(std::move(f));
  return out;
}

// ---------------------------------------------------------------------------
// Scatterers
// ---------------------------------------------------------------------------

Generator excitation_between(Bits reference, Bits target) {
  if (popcount(reference) != popcount(target))
    throw SectorError("target and reference differ in particle number");
  return Generator::excitation(indices_of(reference & ~target), indices_of(target & ~reference));
}

namespace {

std::vector<int> set_minus(const std::vector<int> &a, const std::vector<int> &b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

} // namespace

std::optional<Generator> raising_scatterer(const Generator &from, const Generator &to,
                                           const SpinOrbitalIndexing &occ) {
  if (from.is_scatterer() || to.is_scatterer() || to.rank() != from.rank() + 1)
    return std::nullopt;
  const auto &hf = from.destructions(), &pf = from.creations();
  const auto &ht = to.destructions(), &pt = to.creations();
  const auto new_parts = set_minus(pt, pf);
  const auto new_holes = set_minus(ht, hf);
  const auto lost_holes = set_minus(hf, ht);
  const auto lost_parts = set_minus(pf, pt);
  if (lost_parts.empty() && new_parts.size() == 1 && lost_holes.size() == 1 &&
      new_holes.size() == 2) {
    // a_c^+ a_l^+ a_i a_k: refills hole l, vacates i and k, fills c.
    return Generator::scatterer({new_parts[0], lost_holes[0]}, new_holes, occ);
  }
  if (lost_holes.empty() && new_holes.size() == 1 && lost_parts.size() == 1 &&
      new_parts.size() == 2) {
    // a_c^+ a_b^+ a_e a_k: empties particle e, vacates k, fills c and b.
    return Generator::scatterer(new_parts, {new_holes[0], lost_parts[0]}, occ);
  }
  return std::nullopt;
}

std::optional<double> commutator_coupling(const Generator &scatterer, const Generator &from,
                                          const Generator &to, int n_qubits) {
  const PauliSum s = jw_generator(scatterer, n_qubits);
  const PauliSum k = jw_generator(from, n_qubits);
  const PauliSum target = jw_generator(to, n_qubits);
  const PauliSum comm = s * k - k * s;
  if (target.empty() || comm.size() != target.size())
    return std::nullopt;
  const auto tt = target.terms();
  const double lambda = (comm.coefficient(tt.front().key) / tt.front().coefficient).real();
  for (const auto &t : tt)
    if (std::abs(comm.coefficient(t.key) - lambda * t.coefficient) > 1e-12)
      return std::nullopt;
  return lambda;
}

double scatterer_mp2_measure(const PerturbationModel &model, const Generator &scatterer) {
  if (!scatterer.is_scatterer())
    throw InvalidGeneratorError("not a scatterer: " + scatterer.label());
  const auto &c = scatterer.creations();
  const auto &d = scatterer.destructions();
  return model.transition_measure(c[0], c[1], d[0], d[1]);
}

double scatterer_mp2_measure(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ,
                             const Generator &scatterer) {
  return scatterer_mp2_measure(PerturbationModel(ints, occ), scatterer);
}

const char *to_string(FactorizationVerdict v) noexcept {
  switch (v) {
  case FactorizationVerdict::accepted: return "accepted";
  case FactorizationVerdict::no_pairing: return "no-pairing";
  case FactorizationVerdict::below_threshold: return "below-threshold";
  }
  return "unknown";
}

namespace {

double safe_measure(const PerturbationModel &model, const Generator &s) {
  try {
    return scatterer_mp2_measure(model, s);
  } catch (const DegeneracyError &e) {
    spdlog::warn("scatterer {} has a degenerate denominator; measure set to 0", s.label());
    return 0.0;
  }
}

// Strictly larger measure wins; ties go to the lexicographically smaller
// (double, scatterers) combination.
bool better(const Factorization &cand, const Factorization &best, const OrderedAnsatz &ansatz) {
  if (cand.measure != best.measure)
    return cand.measure > best.measure;
  const auto &gc = ansatz[cand.double_slot].generator;
  const auto &gb = ansatz[best.double_slot].generator;
  if (gc != gb)
    return gc < gb;
  return cand.scatterers < best.scatterers;
}

} // namespace

FactorizationOutcome factorize_high_rank(Bits target, const OrderedAnsatz &ansatz,
                                         const PerturbationModel &model,
                                         double measure_threshold) {
  const auto &occ = model.indexing();
  const Bits ref = occ.reference();
  const int rank = excitation_rank(target, ref);
  if (rank < 3)
    throw RankError("factorization targets need rank >= 3");
  if (rank > 4)
    throw RankError("factorization supports ranks 3 and 4 only");
  const Generator tgt = excitation_between(ref, target);

  std::vector<Generator> intermediates;
  if (rank == 4)
    for (auto &t : enumerate_excitations(occ, 3))
      if (raising_scatterer(t, tgt, occ))
        intermediates.push_back(std::move(t));

  std::optional<Factorization> best;
  const auto consider = [&](Factorization cand) {
    if (!best || better(cand, *best, ansatz))
      best = std::move(cand);
  };

  for (std::size_t slot = 0; slot < ansatz.size(); ++slot) {
    const auto &d = ansatz[slot].generator;
    if (d.is_scatterer() || d.rank() != 2)
      continue;
    if (rank == 3) {
      const auto s = raising_scatterer(d, tgt, occ);
      if (!s)
        continue;
      const auto lambda = commutator_coupling(*s, d, tgt, occ.n_spin);
      if (!lambda)
        continue;
      const double m = safe_measure(model, *s);
      consider({tgt, slot, {*s}, {m}, m, *lambda});
    } else {
      for (const auto &mid : intermediates) {
        const auto s1 = raising_scatterer(d, mid, occ);
        if (!s1)
          continue;
        const auto s2 = raising_scatterer(mid, tgt, occ);
        const auto l1 = commutator_coupling(*s1, d, mid, occ.n_spin);
        const auto l2 = commutator_coupling(*s2, mid, tgt, occ.n_spin);
        if (!l1 || !l2)
          continue;
        const double m1 = safe_measure(model, *s1);
        const double m2 = safe_measure(model, *s2);
        consider({tgt, slot, {*s1, *s2}, {m1, m2}, m1 * m2, *l1 * *l2});
      }
    }
  }

  FactorizationOutcome out;
  if (!best)
    return out;
  out.verdict = best->measure > measure_threshold ? FactorizationVerdict::accepted
                                                  : FactorizationVerdict::below_threshold;
  out.best = std::move(best);
  return out;
}

OrderedAnsatz insert_scatterers(const OrderedAnsatz &ansatz,
                                std::span<const AnsatzFactor> scatterers,
                                std::size_t double_slot) {
  if (double_slot >= ansatz.size())
    throw PairingError("paired slot is out of range");
  const auto &d = ansatz[double_slot].generator;
  if (d.is_scatterer() || d.rank() != 2)
    throw PairingError("scatterers can only be paired with a double excitation, not " +
                       d.label());
  const auto attached = ansatz.scatterers_of(double_slot);
  const std::size_t pos = attached.empty() ? double_slot + 1 : attached.back() + 1;
  const std::size_t shift = scatterers.size();

  OrderedAnsatz out;
  out.factors_.reserve(ansatz.size() + shift);
  for (std::size_t i = 0; i < ansatz.size(); ++i) {
    if (i == pos)
      for (const auto &s : scatterers) {
        if (!s.generator.is_scatterer())
          throw PairingError("only scatterers can be paired: " + s.generator.label());
        AnsatzFactor f = s;
        f.paired_double = double_slot;
        out.factors_.push_back(std::move(f));
      }
    AnsatzFactor f = ansatz[i];
    if (f.paired_double && *f.paired_double >= pos)
      *f.paired_double += shift;
    out.factors_.push_back(std::move(f));
  }
  if (pos == ansatz.size())
    for (const auto &s : scatterers) {
      AnsatzFactor f = s;
      f.paired_double = double_slot;
      out.factors_.push_back(std::move(f));
    }
  return out;
}

nlohmann::json to_json(const OrderedAnsatz &ansatz) {
  nlohmann::json factors = nlohmann::json::array();
  for (std::size_t i = 0; i < ansatz.size(); ++i) {
    const auto &f = ansatz[i];
    nlohmann::json j;
    j["slot"] = i;
    j["kind"] = f.generator.is_scatterer() ? "scatterer" : "excitation";
    j["label"] = f.generator.label();
    j["creations"] = f.generator.creations();
    j["destructions"] = f.generator.destructions();
    j["rank"] = f.generator.rank();
    j["probability"] = f.probability;
    j["measure"] = f.measure;
    j["paired_double"] = f.paired_double ? nlohmann::json(*f.paired_double) : nlohmann::json();
    factors.push_back(std::move(j));
  }
  return {{"schema", "rbmducc.ansatz/1"}, {"application_order", "first factor acts first"},
          {"factors", std::move(factors)}};
}

OrderedAnsatz ansatz_from_json(const nlohmann::json &j, const SpinOrbitalIndexing &occ) {
  OrderedAnsatz out;
  for (const auto &f : j.at("factors")) {
    const auto cr = f.at("creations").get<std::vector<int>>();
    const auto de = f.at("destructions").get<std::vector<int>>();
    AnsatzFactor factor;
    factor.generator = f.at("kind").get<std::string>() == "scatterer"
                           ? Generator::scatterer(cr, de, occ)
                           : Generator::excitation(de, cr);
    factor.probability = f.at("probability").get<double>();
    factor.measure = f.at("measure").get<double>();
    if (!f.at("paired_double").is_null())
      factor.paired_double = f.at("paired_double").get<std::size_t>();
    out.append(std::move(factor));
  }
  return out;
}

} // namespace rbmducc

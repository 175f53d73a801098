// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/protocol.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rbmducc/error.hpp"
#include "rbmducc/jordan_wigner.hpp"

namespace rbmducc {

namespace {

// Stream identifiers for derive_seed.
constexpr std::uint64_t kStreamRbmInit = 1;
constexpr std::uint64_t kStreamReadout = 2;
constexpr std::uint64_t kStreamTrain = 1000;
constexpr std::uint64_t kStreamGenerate = 2000;
constexpr std::uint64_t kStreamRankOffset = 10000;

nlohmann::json configs_json(std::span<const Configuration> configs, int n) {
  auto out = nlohmann::json::array();
  for (const auto &c : configs)
    out.push_back({to_bitstring(c.bits, n), c.probability});
  return out;
}

std::vector<Configuration> entries_of(const TrainingSet &set) {
  std::vector<Configuration> out;
  out.reserve(set.size());
  for (const auto &e : set.entries())
    out.push_back({e.bits, e.probability});
  return out;
}

nlohmann::json iteration_json(const IterationRecord &rec, int n, Bits ref) {
  auto accepted = nlohmann::json::array();
  for (const auto &a : rec.accepted) {
    const auto &f = a.factorization;
    std::vector<std::string> labels;
    for (const auto &s : f.scatterers)
      labels.push_back(s.label());
    accepted.push_back({{"target", to_bitstring(f.target.apply_to(ref).value_or(0), n)},
                        {"excitation", f.target.label()},
                        {"double", a.parent_double.label()},
                        {"scatterers", labels},
                        {"measures", f.measures},
                        {"measure", f.measure},
                        {"coupling", f.coupling},
                        {"probability", a.probability}});
  }
  auto rejected = nlohmann::json::array();
  for (const auto &r : rec.rejected)
    rejected.push_back({{"target", to_bitstring(r.target, n)},
                        {"reason", to_string(r.reason)},
                        {"measure", r.measure}});
  return {{"index", rec.index},
          {"training", configs_json(rec.training, n)},
          {"generated", configs_json(rec.generated, n)},
          {"accepted", accepted},
          {"rejected", rejected},
          {"ansatz", to_json(rec.ansatz)}};
}

ObjectiveSpec make_spec(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ,
                        OrderedAnsatz ansatz, NoiseConfig noise) {
  return {jw_hamiltonian(ints, occ), std::move(ansatz), prepare_reference(occ), noise};
}

} // namespace

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void ProtocolConfig::validate() const {
  if (mp2_threshold < 0.0 || prob_threshold < 0.0 || measure_threshold < 0.0)
    throw ConfigError("protocol thresholds must be >= 0");
  if (max_iterations < 1)
    throw ConfigError("max_iterations must be >= 1");
  if (target_rank != 3 && target_rank != 4)
    throw ConfigError("target_rank must be 3 or 4");
  if (partial_opt && partial_iterations < 0)
    throw ConfigError("partial_iterations must be >= 0");
  if (prepare_replicas < 1)
    throw ConfigError("prepare_replicas must be >= 1");
  noise.validate();
}

nlohmann::json to_json(const ProtocolConfig &c) {
  return {{"mp2_threshold", c.mp2_threshold},
          {"prob_threshold", c.prob_threshold},
          {"measure_threshold", c.measure_threshold},
          {"target_rank", c.target_rank},
          {"max_iterations", c.max_iterations},
          {"partial_opt", c.partial_opt},
          {"partial_iterations", c.partial_iterations},
          {"warm_start", c.warm_start},
          {"seed", c.seed},
          {"cg", {{"tol", c.cg.tol}, {"max_iter", c.cg.max_iter},
                  {"gradient", to_string(c.cg.gradient)}, {"fd_step", c.cg.fd_step}}},
          {"rbm", {{"n_hidden", c.rbm.n_hidden}, {"learning_rate", c.rbm.learning_rate},
                   {"epochs", c.rbm.epochs}, {"cd_k", c.rbm.cd_k},
                   {"batch_size", c.rbm.batch_size}, {"init_sigma", c.rbm.init_sigma}}},
          {"generation", {{"n_samples", c.generation.n_samples},
                          {"burn_in", c.generation.burn_in},
                          {"n_chains", c.generation.n_chains}}},
          {"noise", {{"mode", to_string(c.noise.mode)}, {"p1", c.noise.p1},
                     {"p2", c.noise.p2}, {"p_readout", c.noise.p_readout},
                     {"shots", c.noise.shots}, {"trajectories", c.noise.trajectories},
                     {"seed", c.noise.seed}}},
          {"prepare_under_noise", c.prepare_under_noise},
          {"prepare_replicas", c.prepare_replicas},
          {"spsa", {{"max_iter", c.spsa.max_iter}, {"seed", c.spsa.seed}, {"c", c.spsa.c},
                    {"first_step", c.spsa.first_step}}}};
}

nlohmann::json to_json(const ProtocolTrace &t) {
  auto iters = nlohmann::json::array();
  for (const auto &r : t.iterations)
    iters.push_back(iteration_json(r, t.n_spin, t.reference));
  auto quads = nlohmann::json::array();
  for (const auto &r : t.quadruple_iterations)
    quads.push_back(iteration_json(r, t.n_spin, t.reference));
  nlohmann::json j{{"schema", "rbmducc.trace/1"},
                   {"n_spin", t.n_spin},
                   {"reference", to_bitstring(t.reference, t.n_spin)},
                   {"config", t.config},
                   {"step1_energy", t.step1_energy},
                   {"primary", configs_json(t.primary, t.n_spin)},
                   {"primary_ansatz", to_json(t.primary_ansatz)},
                   {"iterations", iters},
                   {"quadruple_iterations", quads},
                   {"truncated", t.truncated},
                   {"stop_reason", t.stop_reason}};
  j["final_energy"] = t.final_energy ? nlohmann::json(*t.final_energy) : nlohmann::json();
  return j;
}

// ---------------------------------------------------------------------------
// Steps 1 and 2
// ---------------------------------------------------------------------------

Step1Result step1_prepare_psi_sd(const MolecularIntegrals &ints, const ProtocolConfig &config) {
  config.validate();
  const auto occ = make_indexing(ints);
  const PerturbationModel model(ints, occ);
  Step1Result out;
  out.pool = build_duccsd_pool(model, config.mp2_threshold);
  auto spec = make_spec(ints, occ, out.pool, {});
  const std::vector<double> zero(out.pool.size(), 0.0);

  if (config.prepare_under_noise && config.noise.mode != NoiseMode::noiseless) {
    out.params.assign(out.pool.size(), 0.0);
    for (int r = 0; r < config.prepare_replicas; ++r) {
      const auto ur = static_cast<std::uint64_t>(r);
      spec.noise = config.noise;
      spec.noise.seed = derive_seed(config.noise.seed, ur);
      auto spsa = config.spsa;
      spsa.seed = derive_seed(config.spsa.seed, ur);
      const auto res = minimize_spsa(spec, zero, spsa);
      for (std::size_t k = 0; k < out.params.size(); ++k)
        out.params[k] += res.final_params[k] / config.prepare_replicas;
      out.iterations += res.iterations;
    }
    spec.noise = {};
  } else {
    auto cg = config.cg;
    if (config.partial_opt)
      cg.max_iter = config.partial_iterations;
    const auto res = minimize_cg(spec, zero, cg);
    out.params = res.best_params;
    out.iterations = res.iterations;
  }
  Objective obj(spec);
  out.energy = obj.exact(out.params);
  out.state = obj.state(out.params);
  return out;
}

Step2Result step2_build_primary(const OrderedAnsatz &ansatz,
                                std::span<const Configuration> probabilities, Bits reference,
                                const ProtocolConfig &config) {
  Step2Result out;
  out.ansatz = reorder_by_probability(ansatz, probabilities, reference,
                                      {config.prob_threshold, true});
  for (const auto &f : out.ansatz.factors())
    out.raw.push_back({*f.generator.apply_to(reference), f.probability});
  if (out.ansatz.empty()) {
    out.degenerate = true;
    spdlog::warn("no operator survives probability screening; the primary subspace is empty");
    return out;
  }
  out.primary = entries_of(TrainingSet::from_configurations(out.raw, reference));
  return out;
}

Step2Result step2_build_primary(const OrderedAnsatz &ansatz, const Statevector &state,
                                Bits reference, const ProtocolConfig &config) {
  const auto probs = basis_probabilities(state, 0.0);
  return step2_build_primary(ansatz, probs, reference, config);
}

// ---------------------------------------------------------------------------
// Steps 3-6
// ---------------------------------------------------------------------------

LoopResult run_high_rank_loop(const OrderedAnsatz &ansatz, const TrainingSet &raw_training,
                              const PerturbationModel &model, const ProtocolConfig &config,
                              int rank, std::optional<RbmModel> warm_model) {
  config.validate();
  const auto &occ = model.indexing();
  const Bits ref = occ.reference();
  LoopResult out;
  out.ansatz = ansatz;
  out.training = raw_training;
  out.training.set_reference(ref);
  if (out.training.empty())
    return out;

  const int nv = occ.n_spin;
  const int nh = config.rbm.n_hidden > 0 ? config.rbm.n_hidden : nv;
  const std::uint64_t base = config.seed + kStreamRankOffset * static_cast<std::uint64_t>(rank);
  out.model = warm_model ? std::move(*warm_model)
                         : RbmModel::random(nv, nh, derive_seed(base, kStreamRbmInit),
                                            config.rbm.init_sigma);
  const GenerationFilters filters{occ.n_spatial, occ.n_electrons(), occ.ms2(), rank, ref, true};
  std::set<Bits> seen;

  for (int it = 1; it <= config.max_iterations; ++it) {
    const auto uit = static_cast<std::uint64_t>(it);
    IterationRecord rec;
    rec.index = it;
    TrainingSet normalized = out.training;
    normalized.normalize();
    rec.training = entries_of(normalized);

    auto hyper = config.rbm;
    hyper.seed = derive_seed(base, kStreamTrain + uit);
    out.model = train_cd(std::move(out.model), normalized, hyper);

    auto gen = config.generation;
    gen.seed = derive_seed(base, kStreamGenerate + uit);
    rec.generated = generate(out.model, normalized, gen, filters);

    for (const auto &c : rec.generated) {
      if (excitation_rank(c.bits, ref) != rank || !seen.insert(c.bits).second)
        continue;
      const auto outcome = factorize_high_rank(c.bits, out.ansatz, model, config.measure_threshold);
      if (!outcome.accepted()) {
        rec.rejected.push_back(
            {c.bits, outcome.verdict, outcome.best ? outcome.best->measure : 0.0});
        continue;
      }
      const auto &f = *outcome.best;
      const auto parent = out.ansatz[f.double_slot];
      const double p_double = parent.probability;
      const double prob = p_double * f.measure * f.measure;
      std::vector<AnsatzFactor> factors;
      for (std::size_t i = 0; i < f.scatterers.size(); ++i)
        factors.push_back({f.scatterers[i], prob, f.measures[i], std::nullopt});
      out.ansatz = insert_scatterers(out.ansatz, factors, f.double_slot);
      out.training.add(c.bits, prob);
      rec.accepted.push_back({f, parent.generator, prob});
    }
    rec.ansatz = out.ansatz;
    const bool done = rec.accepted.empty();
    spdlog::debug("rank-{} iteration {}: {} generated, {} accepted, {} rejected", rank, it,
                  rec.generated.size(), rec.accepted.size(), rec.rejected.size());
    out.iterations.push_back(std::move(rec));
    if (done)
      return out;
  }
  out.truncated = true;
  spdlog::warn("rank-{} loop stopped at max_iterations = {}", rank, config.max_iterations);
  return out;
}

TsResult run_ts_loop(const MolecularIntegrals &ints, const ProtocolConfig &config) {
  config.validate();
  const auto occ = make_indexing(ints);
  const PerturbationModel model(ints, occ);
  const Bits ref = occ.reference();

  TsResult out;
  out.step1 = step1_prepare_psi_sd(ints, config);
  if (config.prepare_under_noise && config.noise.mode != NoiseMode::noiseless) {
    Rng rng(derive_seed(config.seed, kStreamReadout));
    const auto hist = sample_readout(out.step1.state, config.noise, rng);
    std::vector<Configuration> probs;
    for (const auto &[bits, count] : hist)
      probs.push_back({bits, static_cast<double>(count) / config.noise.shots});
    out.step2 = step2_build_primary(out.step1.pool, probs, ref, config);
  } else {
    out.step2 = step2_build_primary(out.step1.pool, out.step1.state, ref, config);
  }

  TrainingSet raw;
  raw.set_reference(ref);
  for (const auto &c : out.step2.raw)
    raw.add(c.bits, c.probability);
  auto loop = run_high_rank_loop(out.step2.ansatz, raw, model, config, 3);
  out.ansatz = std::move(loop.ansatz);
  out.model = std::move(loop.model);

  auto &t = out.trace;
  t.n_spin = occ.n_spin;
  t.reference = ref;
  t.config = to_json(config);
  t.step1_energy = out.step1.energy;
  t.primary = out.step2.primary;
  t.primary_ansatz = out.step2.ansatz;
  t.iterations = std::move(loop.iterations);
  t.truncated = loop.truncated;
  t.stop_reason = loop.truncated ? "max_iterations"
                  : out.step2.degenerate ? "empty_primary_subspace"
                                         : "no_new_configurations";
  return out;
}

// ---------------------------------------------------------------------------
// Final optimization
// ---------------------------------------------------------------------------

std::vector<double> initial_parameters(const OrderedAnsatz &ansatz, const OrderedAnsatz &pool,
                                       std::span<const double> pool_params, bool warm_start) {
  if (pool_params.size() != pool.size())
    throw ArityError("pool parameters do not match the pool");
  std::vector<double> x(ansatz.size(), 0.0);
  if (!warm_start)
    return x;
  for (std::size_t i = 0; i < ansatz.size(); ++i)
    if (const auto slot = pool.find(ansatz[i].generator))
      x[i] = pool_params[*slot];
  return x;
}

FinalResult finalize_and_optimize(const OrderedAnsatz &ansatz, const MolecularIntegrals &ints,
                                  const ProtocolConfig &config, std::span<const double> init) {
  config.validate();
  const auto occ = make_indexing(ints);
  auto spec = make_spec(ints, occ, ansatz, config.noise);
  Objective obj(spec);
  FinalResult out;
  out.optimizer = config.noise.mode == NoiseMode::noiseless
                      ? minimize_cg(obj, init, config.cg)
                      : minimize_spsa(obj, init, config.spsa);
  out.params = config.noise.mode == NoiseMode::noiseless ? out.optimizer.best_params
                                                         : out.optimizer.final_params;
  out.energy = obj.exact(out.params);
  out.state = obj.state(out.params);
  return out;
}

LoopResult run_tsqs_extension(const OrderedAnsatz &ansatz, const Statevector &state,
                              const MolecularIntegrals &ints, const ProtocolConfig &config,
                              std::optional<RbmModel> warm_model) {
  const auto occ = make_indexing(ints);
  const PerturbationModel model(ints, occ);
  const Bits ref = occ.reference();
  if (occ.n_electrons() < 4) {
    LoopResult out;
    out.ansatz = ansatz;
    return out;
  }
  TrainingSet raw;
  raw.set_reference(ref);
  for (const auto &c : basis_probabilities(state, config.prob_threshold))
    raw.add(c.bits, c.probability);
  return run_high_rank_loop(ansatz, raw, model, config, 4, std::move(warm_model));
}

ProtocolResult run_protocol(const MolecularIntegrals &ints, const ProtocolConfig &config) {
  ProtocolResult out;
  out.ts = run_ts_loop(ints, config);
  const auto init = initial_parameters(out.ts.ansatz, out.ts.step1.pool, out.ts.step1.params,
                                       config.warm_start);
  out.final = finalize_and_optimize(out.ts.ansatz, ints, config, init);
  out.ts.trace.final_energy = out.final.energy;

  if (config.target_rank == 4) {
    auto loop = run_tsqs_extension(out.ts.ansatz, out.final.state, ints, config);
    out.ts.trace.quadruple_iterations = std::move(loop.iterations);
    out.ts.trace.truncated = out.ts.trace.truncated || loop.truncated;
    const auto init4 =
        initial_parameters(loop.ansatz, out.ts.ansatz, out.final.params, config.warm_start);
    out.tsqs_final = finalize_and_optimize(loop.ansatz, ints, config, init4);
    out.tsqs = std::move(loop.ansatz);
  }
  return out;
}

} // namespace rbmducc

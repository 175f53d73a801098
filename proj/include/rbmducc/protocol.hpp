// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file protocol.hpp
 * @brief RBM-guided construction of a dUCC ansatz with scatterer-generated
 * high-rank excitations.
 *
 * Steps: (1) optimize an MP2-screened dUCCSD state; (2) read determinant
 * probabilities, reorder and screen the ansatz; (3) train an RBM on the
 * primary configurations; (4) sample rank >= 3 configurations; (5) express
 * each through a double and scatterer(s); (6) screen by MP2 measure, insert,
 * extend the training set and repeat until nothing new is accepted.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmducc/ansatz.hpp"
#include "rbmducc/integrals.hpp"
#include "rbmducc/rbm.hpp"
#include "rbmducc/simulator.hpp"
#include "rbmducc/vqe.hpp"

namespace rbmducc {

struct ProtocolConfig {
  double mp2_threshold = 1e-5;
  double prob_threshold = 1e-5;
  double measure_threshold = 1e-6;
  /// 3 builds the triples ansatz; 4 additionally runs the quadruples pass.
  int target_rank = 3;
  int max_iterations = 20;
  /// Stop the first optimization after partial_iterations CG iterations.
  bool partial_opt = false;
  int partial_iterations = 0;
  /// Final optimization starts singles/doubles from the first-step optimum.
  bool warm_start = true;
  std::uint64_t seed = 0;
  CgOptions cg;
  RbmHyper rbm;
  GenerationOptions generation;

  /// Noise used for SPSA optimizations when mode != noiseless.
  NoiseConfig noise;
  /// Optimize the first-step state under noise (variant 1) instead of
  /// noiselessly (variant 2). Only meaningful with noise.
  bool prepare_under_noise = false;
  /// SPSA replicas whose mean parameters define the noisy first-step state.
  int prepare_replicas = 20;
  SpsaOptions spsa;

  /// Throws ConfigError.
  void validate() const;
};

[[nodiscard]] nlohmann::json to_json(const ProtocolConfig &config);

struct Step1Result {
  OrderedAnsatz pool;
  std::vector<double> params;
  double energy = 0.0;
  Statevector state;
  int iterations = 0;
};

struct Step2Result {
  OrderedAnsatz ansatz;
  /// Determinants reached by the kept factors, normalized, reference excluded.
  std::vector<Configuration> primary;
  /// Raw probabilities of the same determinants.
  std::vector<Configuration> raw;
  /// Set when no operator survives screening.
  bool degenerate = false;
};

struct AcceptedTarget {
  Factorization factorization;
  Generator parent_double;
  /// P(parent double) * measure^2, before renormalization.
  double probability = 0.0;
};

struct RejectedTarget {
  Bits target = 0;
  FactorizationVerdict reason = FactorizationVerdict::no_pairing;
  double measure = 0.0;
};

struct IterationRecord {
  int index = 0;
  /// Normalized training set used in this iteration.
  std::vector<Configuration> training;
  std::vector<Configuration> generated;
  std::vector<AcceptedTarget> accepted;
  std::vector<RejectedTarget> rejected;
  OrderedAnsatz ansatz;
};

struct ProtocolTrace {
  int n_spin = 0;
  Bits reference = 0;
  nlohmann::json config;
  double step1_energy = 0.0;
  std::vector<Configuration> primary;
  OrderedAnsatz primary_ansatz;
  std::vector<IterationRecord> iterations;
  /// Iterations of the optional quadruples pass.
  std::vector<IterationRecord> quadruple_iterations;
  bool truncated = false;
  std::string stop_reason;
  std::optional<double> final_energy;
};

[[nodiscard]] nlohmann::json to_json(const ProtocolTrace &trace);

/// MP2-screened dUCCSD pool optimized from zero (CG, or averaged SPSA
/// replicas when preparing under noise).
[[nodiscard]] Step1Result step1_prepare_psi_sd(const MolecularIntegrals &ints,
                                               const ProtocolConfig &config);

[[nodiscard]] Step2Result step2_build_primary(const OrderedAnsatz &ansatz,
                                              const Statevector &state, Bits reference,
                                              const ProtocolConfig &config);
/// Same, from already extracted determinant probabilities.
[[nodiscard]] Step2Result step2_build_primary(const OrderedAnsatz &ansatz,
                                              std::span<const Configuration> probabilities,
                                              Bits reference, const ProtocolConfig &config);

struct LoopResult {
  OrderedAnsatz ansatz;
  std::vector<IterationRecord> iterations;
  bool truncated = false;
  /// Raw (unnormalized) training set after the last iteration.
  TrainingSet training;
  RbmModel model;
};

/// Steps 3-6 for targets of exactly `rank`, starting from `ansatz` and the
/// raw training probabilities.
[[nodiscard]] LoopResult run_high_rank_loop(const OrderedAnsatz &ansatz,
                                            const TrainingSet &raw_training,
                                            const PerturbationModel &model,
                                            const ProtocolConfig &config, int rank,
                                            std::optional<RbmModel> warm_model = {});

struct TsResult {
  Step1Result step1;
  Step2Result step2;
  OrderedAnsatz ansatz;
  ProtocolTrace trace;
  RbmModel model;
};

/// Steps 1-6 for rank-3 targets.
[[nodiscard]] TsResult run_ts_loop(const MolecularIntegrals &ints, const ProtocolConfig &config);

struct FinalResult {
  double energy = 0.0;
  std::vector<double> params;
  Statevector state;
  OptimizerResult optimizer;
};

/// Initial parameters: zero everywhere, or first-step values for factors
/// found in `pool` when warm starting.
[[nodiscard]] std::vector<double> initial_parameters(const OrderedAnsatz &ansatz,
                                                     const OrderedAnsatz &pool,
                                                     std::span<const double> pool_params,
                                                     bool warm_start);

/// CG when config.noise is noiseless, SPSA otherwise.
[[nodiscard]] FinalResult finalize_and_optimize(const OrderedAnsatz &ansatz,
                                                const MolecularIntegrals &ints,
                                                const ProtocolConfig &config,
                                                std::span<const double> init);

/// Quadruples pass fed by an optimized triples-level state. A no-op for
/// fewer than four electrons.
[[nodiscard]] LoopResult run_tsqs_extension(const OrderedAnsatz &ansatz,
                                            const Statevector &state,
                                            const MolecularIntegrals &ints,
                                            const ProtocolConfig &config,
                                            std::optional<RbmModel> warm_model = {});

struct ProtocolResult {
  TsResult ts;
  FinalResult final;
  /// Present when config.target_rank == 4.
  std::optional<OrderedAnsatz> tsqs;
  std::optional<FinalResult> tsqs_final;
};

/// Complete pipeline including the final optimization(s).
[[nodiscard]] ProtocolResult run_protocol(const MolecularIntegrals &ints,
                                          const ProtocolConfig &config);

} // namespace rbmducc

// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Command implementations behind the rbmducc executable.
 *
 * Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
 * 3 missing assets or an empty sweep.
 */

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmducc/error.hpp"
#include "rbmducc/protocol.hpp"

namespace rbmducc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAssets = 3;

/// Environment variable naming the asset directory.
inline constexpr const char *kAssetEnv = "RBMDUCC_ASSET_ROOT";

enum class Family { duccsd, duccsdt, rbm_ts, rbm_tsqs };
enum class OptimizerKind { cg, spsa };

[[nodiscard]] const char *to_string(Family f) noexcept;
[[nodiscard]] const char *to_string(OptimizerKind o) noexcept;
/// Throws ConfigError.
[[nodiscard]] Family parse_family(const std::string &s);
[[nodiscard]] OptimizerKind parse_optimizer(const std::string &s);

/// --assets, then $RBMDUCC_ASSET_ROOT, then the source tree's assets/.
[[nodiscard]] std::string resolve_asset_root(const std::string &flag);

/// Asset ids listed in asset_root/manifest.json, or the *.fcidump stems.
[[nodiscard]] std::vector<std::string> list_assets(const std::string &asset_root);
/// Exact id, or for a bare molecule name the geometry with the lowest
/// Hartree-Fock energy. Throws AssetError.
[[nodiscard]] std::string resolve_system(const std::string &asset_root, const std::string &name);
/// Ids "<molecule>_<geometry>" sorted by geometry. Throws AssetError when empty.
[[nodiscard]] std::vector<std::string> sweep_ids(const std::string &asset_root,
                                                 const std::string &molecule);

struct RunConfig {
  std::string system;
  std::string fcidump;
  std::string asset_root;
  Family family = Family::rbm_ts;
  OptimizerKind optimizer = OptimizerKind::cg;
  ProtocolConfig protocol;
  std::string out_dir = "rbmducc_out";

  /// FCIDUMP path from fcidump or the resolved asset. Throws AssetError.
  [[nodiscard]] std::string integrals_path() const;
  /// Throws ConfigError for invalid combinations (CG with noise, no system)
  /// and AssetError for missing files.
  void validate() const;
};

[[nodiscard]] nlohmann::json to_json(const RunConfig &config);

struct FamilyResult {
  Family family = Family::rbm_ts;
  OrderedAnsatz ansatz;
  double energy = 0.0;
  std::vector<double> params;
  Statevector state;
  GateCostReport cost;
  OptimizerResult optimizer;
  std::optional<ProtocolTrace> trace;
};

/// Builds and optimizes one ansatz family. Noisy runs start from zero;
/// noiseless runs of the RBM families warm start per protocol.warm_start.
[[nodiscard]] FamilyResult run_family(const MolecularIntegrals &ints, Family family,
                                      const RunConfig &config);

int cmd_run(const RunConfig &config, std::ostream &log);

struct CompareConfig {
  RunConfig base;
  /// Molecule prefix of the bundled asset ids, e.g. "bh".
  std::string molecule;
  /// Explicit asset ids; overrides the molecule sweep when non-empty.
  std::vector<std::string> systems;
  std::vector<Family> families{Family::duccsd, Family::duccsdt, Family::rbm_ts};
};

int cmd_compare(const CompareConfig &config, std::ostream &log);

struct NoisyFamily {
  Family family = Family::duccsd;
  /// Variant 1 prepares the first-step state under noise.
  bool prepare_under_noise = false;
};

[[nodiscard]] std::string to_string(const NoisyFamily &f);
/// duccsd, duccsdt, rbm-ts-1 or rbm-ts-2. Throws ConfigError.
[[nodiscard]] NoisyFamily parse_noisy_family(const std::string &s);

struct NoisyConfig {
  RunConfig base;
  int replicas = 20;
  std::vector<NoisyFamily> families{{Family::rbm_ts, true},
                                    {Family::rbm_ts, false},
                                    {Family::duccsd, false},
                                    {Family::duccsdt, false}};
};

struct NoisyFamilySummary {
  NoisyFamily family;
  int cnot_count = 0;
  /// Estimated energy at the last iterate of each replica.
  std::vector<double> final_energies;
  /// Exact energy at the same parameters.
  std::vector<double> exact_energies;
  /// Per-replica trajectories and their average, truncated to the
  /// shortest replica.
  std::vector<std::vector<double>> trajectories;
  std::vector<double> mean_trajectory;
  [[nodiscard]] double mean_final() const;
  [[nodiscard]] double mean_exact() const;
};

/// SPSA replicas per family; replica r uses noise seed
/// derive_seed(noise.seed, r) and SPSA seed derive_seed(spsa.seed, r).
[[nodiscard]] std::vector<NoisyFamilySummary> run_noisy(const MolecularIntegrals &ints,
                                                        const NoisyConfig &config);

int cmd_noisy(const NoisyConfig &config, std::ostream &log);

/// Recomputes golden values for every bundled asset (or the listed ids).
int cmd_oracle(const std::string &asset_root, const std::string &out_path,
               const std::vector<std::string> &ids, std::ostream &log);

/// FNV-1a 64-bit digest, hex encoded.
[[nodiscard]] std::string digest(const std::string &text);

/// Writes through a temporary file and renames into place.
void write_file_atomic(const std::string &path, const std::string &content);

} // namespace rbmducc::cli

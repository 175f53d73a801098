// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

// rbmducc command-line driver.
//
// Options may come from flags or from a key=value file passed with --config.
// Top-level keys set shared options; [run], [compare] and [noisy] sections
// set subcommand options, e.g.
//
//   system = bh_2.25
//   seed = 7
//   [run]
//   family = duccsdt

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rbmducc/cli.hpp"
#include "rbmducc/kernels.hpp"

using namespace rbmducc;

namespace {

struct Shared {
  std::string config_file;
  std::string assets;
  std::string system;
  std::string fcidump;
  std::string out = "rbmducc_out";
  std::string optimizer = "auto";
  std::string noise = "noiseless";
  std::string gradient = "adjoint";
  std::string log_level = "warn";
  int threads = 0;
  ProtocolConfig protocol;
};

void add_shared(CLI::App &app, Shared &s) {
  auto &p = s.protocol;
  app.add_option("--assets", s.assets, "Asset directory (default $RBMDUCC_ASSET_ROOT)");
  app.add_option("--system", s.system, "Asset id such as bh_2.25, or a molecule name");
  app.add_option("--fcidump", s.fcidump, "Explicit FCIDUMP path");
  app.add_option("--out", s.out, "Output directory")->capture_default_str();
  app.add_option("--optimizer", s.optimizer, "cg, spsa or auto")->capture_default_str();
  app.add_option("--seed", p.seed, "Protocol seed")->capture_default_str();
  app.add_option("--threads", s.threads, "OpenMP threads (0 keeps the runtime default)");
  app.add_option("--log-level", s.log_level, "trace, debug, info, warn, error")
      ->capture_default_str();

  app.add_option("--mp2-threshold", p.mp2_threshold)->capture_default_str();
  app.add_option("--prob-threshold", p.prob_threshold)->capture_default_str();
  app.add_option("--measure-threshold", p.measure_threshold)->capture_default_str();
  app.add_option("--max-iterations", p.max_iterations)->capture_default_str();
  app.add_option("--partial-iterations", p.partial_iterations,
                 "Stop the first optimization after this many CG iterations")
      ->each([&p](const std::string &) { p.partial_opt = true; });
  app.add_flag("!--no-warm-start", p.warm_start, "Start the final optimization from zero");
  app.add_option("--prepare-replicas", p.prepare_replicas)->capture_default_str();

  app.add_option("--cg-tol", p.cg.tol)->capture_default_str();
  app.add_option("--cg-max-iter", p.cg.max_iter)->capture_default_str();
  app.add_option("--gradient", s.gradient, "adjoint or fd")->capture_default_str();
  app.add_option("--spsa-iter", p.spsa.max_iter)->capture_default_str();
  app.add_option("--spsa-seed", p.spsa.seed)->capture_default_str();
  app.add_option("--spsa-c", p.spsa.c)->capture_default_str();
  app.add_option("--spsa-first-step", p.spsa.first_step)->capture_default_str();

  app.add_option("--noise", s.noise, "noiseless, shot-gaussian or trajectory")
      ->capture_default_str();
  app.add_option("--p1", p.noise.p1, "Single-qubit depolarizing probability");
  app.add_option("--p2", p.noise.p2, "Two-qubit depolarizing probability");
  app.add_option("--p-readout", p.noise.p_readout, "Readout flip probability");
  app.add_option("--shots", p.noise.shots)->capture_default_str();
  app.add_option("--trajectories", p.noise.trajectories)->capture_default_str();
  app.add_option("--noise-seed", p.noise.seed)->capture_default_str();

  app.add_option("--rbm-hidden", p.rbm.n_hidden, "0 means n_visible");
  app.add_option("--rbm-lr", p.rbm.learning_rate)->capture_default_str();
  app.add_option("--rbm-epochs", p.rbm.epochs)->capture_default_str();
  app.add_option("--rbm-cd-k", p.rbm.cd_k)->capture_default_str();
  app.add_option("--rbm-batch", p.rbm.batch_size)->capture_default_str();
  app.add_option("--gen-samples", p.generation.n_samples)->capture_default_str();
  app.add_option("--gen-burn-in", p.generation.burn_in)->capture_default_str();
  app.add_option("--gen-chains", p.generation.n_chains)->capture_default_str();
}

cli::RunConfig base_config(const Shared &s, bool noisy_command) {
  cli::RunConfig c;
  c.asset_root = cli::resolve_asset_root(s.assets);
  c.system = s.system;
  c.fcidump = s.fcidump;
  c.out_dir = s.out;
  c.protocol = s.protocol;
  c.protocol.noise.mode = parse_noise_mode(s.noise);
  c.protocol.cg.gradient = parse_gradient_method(s.gradient);
  if (s.optimizer == "auto")
    c.optimizer = (noisy_command || c.protocol.noise.mode != NoiseMode::noiseless)
                      ? cli::OptimizerKind::spsa
                      : cli::OptimizerKind::cg;
  else
    c.optimizer = cli::parse_optimizer(s.optimizer);
  return c;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"RBM-guided dUCC ansatz construction and VQE driver"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  app.get_config_formatter_base()->arrayDelimiter(',');

  Shared shared;
  add_shared(app, shared);

  std::string family = "rbm-ts";
  auto *run = app.add_subcommand("run", "Build and optimize one ansatz family");
  run->add_option("--family", family, "duccsd, duccsdt, rbm-ts or rbm-tsqs")
      ->capture_default_str();

  std::string molecule;
  std::vector<std::string> systems;
  std::vector<std::string> compare_families{"duccsd", "duccsdt", "rbm-ts"};
  auto *compare = app.add_subcommand("compare", "Sweep the bundled geometries of one molecule");
  compare->add_option("--molecule", molecule, "Molecule prefix, e.g. bh");
  compare->add_option("--systems", systems, "Explicit asset ids")->delimiter(',');
  compare->add_option("--families", compare_families)->delimiter(',')->capture_default_str();

  int replicas = 20;
  std::vector<std::string> noisy_families{"rbm-ts-1", "rbm-ts-2", "duccsd", "duccsdt"};
  auto *noisy = app.add_subcommand("noisy", "Seeded SPSA replicas under noise");
  noisy->add_option("--replicas", replicas)->capture_default_str();
  noisy->add_option("--families", noisy_families)->delimiter(',')->capture_default_str();

  std::string golden_out;
  std::vector<std::string> golden_ids;
  auto *oracle_cmd = app.add_subcommand("oracle", "Regenerate golden FCI/HF/MP2 values");
  oracle_cmd->add_option("--golden", golden_out, "Output path (default <assets>/golden.json)");
  oracle_cmd->add_option("--ids", golden_ids, "Asset ids (default all)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  spdlog::set_level(spdlog::level::from_str(shared.log_level));
  kernels::set_threads(shared.threads);

  try {
    if (*oracle_cmd)
      return cli::cmd_oracle(cli::resolve_asset_root(shared.assets), golden_out, golden_ids,
                             std::cerr);
    auto base = base_config(shared, static_cast<bool>(*noisy));
    if (*run) {
      base.family = cli::parse_family(family);
      return cli::cmd_run(base, std::cerr);
    }
    if (*compare) {
      cli::CompareConfig c;
      c.base = base;
      c.molecule = molecule;
      c.systems = systems;
      c.families.clear();
      for (const auto &f : compare_families)
        c.families.push_back(cli::parse_family(f));
      return cli::cmd_compare(c, std::cerr);
    }
    cli::NoisyConfig c;
    c.base = base;
    c.replicas = replicas;
    c.families.clear();
    for (const auto &f : noisy_families)
      c.families.push_back(cli::parse_noisy_family(f));
    return cli::cmd_noisy(c, std::cerr);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return cli::kExitConfig;
  }
}

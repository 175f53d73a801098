// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include "rbmducc/cli.hpp"
#include "rbmducc/oracle.hpp"
#include "support.hpp"

using namespace rbmducc;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

fs::path scratch(const std::string &name) {
  const auto p = fs::temp_directory_path() / ("rbmducc_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::RunConfig h2_config(const fs::path &out) {
  cli::RunConfig c;
  c.asset_root = RBMDUCC_ASSET_DIR;
  c.system = "h2";
  c.out_dir = out.string();
  return c;
}

int run_binary(const std::string &args) {
  const std::string cmd = std::string(RBMDUCC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("names parse and print", "[cli]") {
  for (auto f : {cli::Family::duccsd, cli::Family::duccsdt, cli::Family::rbm_ts,
                 cli::Family::rbm_tsqs})
    CHECK(cli::parse_family(cli::to_string(f)) == f);
  CHECK_THROWS_AS(cli::parse_family("uccsd"), ConfigError);
  CHECK(cli::parse_optimizer("spsa") == cli::OptimizerKind::spsa);
  CHECK_THROWS_AS(cli::parse_optimizer("adam"), ConfigError);
  for (const char *s : {"rbm-ts-1", "rbm-ts-2", "duccsd", "duccsdt"})
    CHECK(cli::to_string(cli::parse_noisy_family(s)) == s);
  CHECK_THROWS_AS(cli::parse_noisy_family("rbm-ts"), ConfigError);
}

TEST_CASE("FNV-1a digest matches published vectors", "[cli]") {
  CHECK(cli::digest("") == "cbf29ce484222325");
  CHECK(cli::digest("a") == "af63dc4c8601ec8c");
  CHECK(cli::digest("foobar") == "85944171f73967e8");
}

TEST_CASE("atomic writes leave no temporary file", "[cli]") {
  const auto dir = scratch("atomic");
  const auto file = dir / "sub" / "x.txt";
  cli::write_file_atomic(file.string(), "one");
  cli::write_file_atomic(file.string(), "two");
  CHECK(slurp(file) == "two");
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
}

TEST_CASE("asset resolution", "[cli]") {
  const std::string root = RBMDUCC_ASSET_DIR;
  CHECK(cli::resolve_system(root, "bh_2.25") == "bh_2.25");
  CHECK(cli::resolve_system(root, "h2") == "h2_0.735");
  CHECK_THROWS_AS(cli::resolve_system(root, "n2"), AssetError);
  const auto bh = cli::sweep_ids(root, "bh");
  REQUIRE(bh.size() == 7);
  CHECK(bh.front() == "bh_1.0");
  CHECK(bh.back() == "bh_2.5");
  CHECK_THROWS_AS(cli::sweep_ids(root, "n2"), AssetError);

  CHECK(cli::resolve_asset_root("/x") == "/x");
  ::setenv(cli::kAssetEnv, "/from/env", 1);
  CHECK(cli::resolve_asset_root("") == "/from/env");
  ::unsetenv(cli::kAssetEnv);
  CHECK_FALSE(cli::resolve_asset_root("").empty());
}

TEST_CASE("run config validation", "[cli]") {
  auto c = h2_config(scratch("validate"));
  CHECK_NOTHROW(c.validate());
  c.protocol.noise.mode = NoiseMode::shot_gaussian;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.optimizer = cli::OptimizerKind::spsa;
  CHECK_NOTHROW(c.validate());
  c.fcidump = "/does/not/exist.fcidump";
  CHECK_THROWS_AS(c.validate(), AssetError);
  c.fcidump.clear();
  c.system.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("run on H2 writes outputs at the FCI energy", "[cli]") {
  const auto out = scratch("h2");
  std::ostringstream log;
  REQUIRE(cli::cmd_run(h2_config(out), log) == cli::kExitOk);
  for (const char *f : {"energies.json", "trace.json", "trajectory.csv", "manifest.json"})
    CHECK(fs::exists(out / f));
  const auto e = nlohmann::json::parse(slurp(out / "energies.json"));
  const auto fci = oracle::fci_ground(testing::load("h2_0.735"),
                                      make_indexing(testing::load("h2_0.735")))
                       .energy;
  CHECK(std::abs(e["energy_hartree"].get<double>() - fci) <= 1e-8);
  CHECK(std::abs(e["error_hartree"].get<double>()) <= 1e-8);
  CHECK(e["cnot_count"].get<int>() > 0);
  CHECK(slurp(out / "trajectory.csv").rfind("eval_index,energy_hartree\n", 0) == 0);

  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["config_hash"] == cli::digest(m["config"].dump()));
  CHECK(m["outputs"]["energies.json"] == cli::digest(slurp(out / "energies.json")));
  CHECK(m["code_version"].get<std::string>().size() > 0);
  CHECK(m["seeds"].contains("protocol"));
}

TEST_CASE("noiseless runs reproduce byte for byte", "[cli]") {
  auto a = h2_config(scratch("rep_a"));
  auto b = h2_config(scratch("rep_b"));
  a.system = b.system = "h4_1.0";
  a.protocol.seed = b.protocol.seed = 11;
  std::ostringstream log;
  REQUIRE(cli::cmd_run(a, log) == cli::kExitOk);
  REQUIRE(cli::cmd_run(b, log) == cli::kExitOk);
  for (const char *f : {"energies.json", "trace.json", "trajectory.csv", "manifest.json"})
    CHECK(slurp(fs::path(a.out_dir) / f) == slurp(fs::path(b.out_dir) / f));
}

TEST_CASE("command errors map to exit codes", "[cli]") {
  std::ostringstream log;
  auto c = h2_config(scratch("errors"));
  c.protocol.noise.mode = NoiseMode::shot_gaussian;
  CHECK(cli::cmd_run(c, log) == cli::kExitConfig);

  cli::NoisyConfig n;
  n.base = h2_config(scratch("errors_noisy"));
  n.base.optimizer = cli::OptimizerKind::cg;
  CHECK(cli::cmd_noisy(n, log) == cli::kExitConfig);

  cli::CompareConfig cmp;
  cmp.base = h2_config(scratch("errors_cmp"));
  CHECK(cli::cmd_compare(cmp, log) == cli::kExitAssets);
  cmp.molecule = "n2";
  CHECK(cli::cmd_compare(cmp, log) == cli::kExitAssets);
  cmp.molecule.clear();
  cmp.systems = {"h2_0.735", "h2_9.9"};
  CHECK(cli::cmd_compare(cmp, log) == cli::kExitAssets);

  auto missing = h2_config(scratch("errors_missing"));
  missing.system = "n2";
  CHECK(cli::cmd_run(missing, log) == cli::kExitAssets);
  CHECK(cli::cmd_oracle("/does/not/exist", "", {}, log) == cli::kExitAssets);
}

TEST_CASE("executable exit codes", "[cli][exe]") {
  const auto out = scratch("exe");
  CHECK(run_binary("run --system h2 --family bogus --out " + out.string()) == cli::kExitConfig);
  CHECK(run_binary("noisy --system h2 --optimizer cg --out " + out.string()) == cli::kExitConfig);
  CHECK(run_binary("compare --molecule n2 --out " + out.string()) == cli::kExitAssets);
  CHECK(run_binary("compare --out " + out.string()) == cli::kExitAssets);
  CHECK(run_binary("frobnicate") == cli::kExitConfig);
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("run --system h2 --family duccsd --out " + out.string()) == cli::kExitOk);

  const auto cfg = scratch("exe_cfg");
  fs::create_directories(cfg);
  {
    std::ofstream f(cfg / "run.ini");
    f << "system = h2_1.0\nout = " << (cfg / "out").string() << "\n[run]\nfamily = duccsdt\n";
  }
  REQUIRE(run_binary("run --config " + (cfg / "run.ini").string()) == cli::kExitOk);
  const auto e = nlohmann::json::parse(slurp(cfg / "out" / "energies.json"));
  CHECK(e["system"] == "h2_1.0");
  CHECK(e["family"] == "duccsdt");
}

TEST_CASE("H2 sweep gives FCI for every family", "[cli]") {
  cli::CompareConfig cmp;
  cmp.base = h2_config(scratch("cmp_h2"));
  cmp.molecule = "h2";
  std::ostringstream log;
  REQUIRE(cli::cmd_compare(cmp, log) == cli::kExitOk);
  std::istringstream csv(slurp(fs::path(cmp.base.out_dir) / "compare_h2.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("system,geometry,energy_duccsd", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');)
      cells.push_back(cell);
    REQUIRE(cells.size() == 11);
    for (int k = 5; k < 8; ++k)
      CHECK(std::abs(std::stod(cells[static_cast<std::size_t>(k)])) <= 1e-8);
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("BH conventional triples cost the most CNOTs", "[cli]") {
  const auto ints = testing::load("bh_2.25");
  auto c = h2_config(scratch("bh_cost"));
  c.system = "bh_2.25";
  const auto sd = cli::run_family(ints, cli::Family::duccsd, c);
  const auto sdt = cli::run_family(ints, cli::Family::duccsdt, c);
  const auto ts = cli::run_family(ints, cli::Family::rbm_ts, c);
  CHECK(sdt.cost.cnot_count > sd.cost.cnot_count);
  CHECK(sdt.cost.cnot_count > ts.cost.cnot_count);
  CHECK(ts.trace.has_value());
  CHECK(ts.energy < oracle::compute_golden(ints).hf_energy);
}

TEST_CASE("noisy replicas are reproducible and averaged", "[cli][noisy]") {
  const auto ints = testing::load("h2_0.735");
  cli::NoisyConfig n;
  n.base = h2_config(scratch("noisy"));
  n.base.optimizer = cli::OptimizerKind::spsa;
  n.base.protocol.noise.mode = NoiseMode::shot_gaussian;
  n.base.protocol.noise.p2 = 1e-3;
  n.base.protocol.noise.seed = 5;
  n.base.protocol.spsa.max_iter = 40;
  n.replicas = 1;
  n.families = {{cli::Family::duccsd, false}};
  const auto a = cli::run_noisy(ints, n);
  const auto b = cli::run_noisy(ints, n);
  REQUIRE(a.size() == 1);
  CHECK(a[0].trajectories == b[0].trajectories);
  CHECK(a[0].final_energies == b[0].final_energies);

  n.replicas = 3;
  const auto c = cli::run_noisy(ints, n);
  REQUIRE(c[0].trajectories.size() == 3);
  CHECK(c[0].trajectories[0] == a[0].trajectories[0]);
  const auto &t = c[0].trajectories;
  for (std::size_t k = 0; k < c[0].mean_trajectory.size(); ++k)
    CHECK(c[0].mean_trajectory[k] == Approx((t[0][k] + t[1][k] + t[2][k]) / 3.0));
  CHECK(c[0].mean_final() ==
        Approx((c[0].final_energies[0] + c[0].final_energies[1] + c[0].final_energies[2]) / 3));

  std::ostringstream log;
  REQUIRE(cli::cmd_noisy(n, log) == cli::kExitOk);
  const fs::path out = n.base.out_dir;
  CHECK(fs::exists(out / "duccsd_replica_2.csv"));
  CHECK(fs::exists(out / "duccsd_mean.csv"));
  CHECK(fs::exists(out / "noisy_summary.json"));
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("noiseless surrogate stays variational and improves on HF", "[cli][noisy]") {
  const auto ints = testing::load("h4_1.0");
  const auto g = oracle::compute_golden(ints);
  cli::NoisyConfig n;
  n.base = h2_config(scratch("surrogate"));
  n.base.optimizer = cli::OptimizerKind::spsa;
  n.base.protocol.spsa.max_iter = 500;
  n.replicas = 2;
  n.families = {{cli::Family::rbm_ts, false}};
  const auto s = cli::run_noisy(ints, n);
  REQUIRE(s.size() == 1);
  for (std::size_t r = 0; r < s[0].trajectories.size(); ++r) {
    const auto &t = s[0].trajectories[r];
    REQUIRE_FALSE(t.empty());
    double best = t.front();
    for (double e : t) {
      CHECK(e >= g.fci_energy - 1e-9);
      best = std::min(best, e);
    }
    CHECK(best < g.hf_energy);
    CHECK(s[0].exact_energies[r] < g.hf_energy);
    CHECK(s[0].final_energies[r] == s[0].exact_energies[r]);
  }
}

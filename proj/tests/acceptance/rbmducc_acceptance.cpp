// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and workloads are fixed below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rbmducc/cli.hpp"
#include "rbmducc/jordan_wigner.hpp"
#include "rbmducc/kernels.hpp"
#include "rbmducc/oracle.hpp"
#include "rbmducc/protocol.hpp"
#include "rbmducc/random.hpp"

using namespace rbmducc;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kOracleTol = 1e-10;
constexpr double kOracleSeconds = 30.0;
constexpr double kExactTol = 1e-8;
constexpr double kH2Seconds = 5.0;
constexpr double kEnergyGap = 5e-4;
constexpr double kVariationalSlack = 1e-9;
constexpr double kOverlapGap = 1e-3;
constexpr double kCostRatio = 5.0;
constexpr double kCouplingTol = 1e-10;
constexpr double kMarginalTol = 1e-10;
constexpr double kRbmSeconds = 60.0;
constexpr double kMp2Tol = 1e-10;

// Noisy workload.
constexpr int kNoisyReplicasMin = 10;
constexpr int kSpsaIterations = 500;
constexpr int kShots = 10000;
constexpr double kP1 = 1e-4;
constexpr double kP2 = 5e-4;
constexpr double kReadout = 1e-2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

MolecularIntegrals load(const std::string &root, const std::string &id) {
  return parse_fcidump((fs::path(root) / (id + ".fcidump")).string());
}

double fci_energy(const MolecularIntegrals &ints) {
  return oracle::fci_ground(ints, make_indexing(ints)).energy;
}

// Shared BH 2.25 results used by several criteria.
struct BhRuns {
  MolecularIntegrals ints;
  double fci = 0.0;
  cli::FamilyResult ts, sd, sdt;
};

cli::RunConfig bh_config(const std::string &root, std::uint64_t seed) {
  cli::RunConfig c;
  c.asset_root = root;
  c.system = "bh_2.25";
  c.protocol.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------

Outcome criterion1(const std::string &root) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string names;
  for (const char *id : {"h2_0.735", "h4_1.0", "bh_2.25"}) {
    const auto ints = load(root, id);
    const auto occ = make_indexing(ints);
    const auto a = oracle::dense_from_pauli(jw_hamiltonian(ints, occ));
    const auto b = oracle::dense_hamiltonian(ints);
    worst = std::max(worst, oracle::max_abs_difference(a, b));
    names += fmt::format("{}({} modes) ", id, occ.n_spin);
  }
  const double t = seconds_since(t0);
  return {worst <= kOracleTol && t < kOracleSeconds,
          fmt::format("{}max |dH| = {:.2e}, {:.1f} s", names, worst, t)};
}

Outcome criterion2(const std::string &root) {
  const auto t0 = Clock::now();
  const auto ints = load(root, "h2_0.735");
  const auto occ = make_indexing(ints);
  ObjectiveSpec spec{jw_hamiltonian(ints, occ), build_conventional(occ, 2),
                     prepare_reference(occ), {}};
  const std::vector<double> zero(spec.ansatz.size(), 0.0);
  const auto r = minimize_cg(spec, zero);
  const double err = std::abs(r.best_energy - fci_energy(ints));
  const double t = seconds_since(t0);
  return {err <= kExactTol && t < kH2Seconds,
          fmt::format("|E - E_FCI| = {:.2e} after {} CG iterations, {:.2f} s", err, r.iterations,
                      t)};
}

Outcome criterion3(const BhRuns &bh) {
  const double gap = std::abs(bh.ts.energy - bh.sdt.energy);
  const bool variational = bh.ts.energy >= bh.fci - kVariationalSlack &&
                           bh.sdt.energy >= bh.fci - kVariationalSlack;
  return {gap <= kEnergyGap && variational,
          fmt::format("E(ts) = {:.10f}, E(sdt) = {:.10f}, E_FCI = {:.10f}, |dE| = {:.2e}",
                      bh.ts.energy, bh.sdt.energy, bh.fci, gap)};
}

Outcome criterion4(const BhRuns &bh) {
  const double s = overlap(bh.ts.state, bh.sdt.state);
  return {1.0 - s <= kOverlapGap, fmt::format("1 - S = {:.3e}", 1.0 - s)};
}

Outcome criterion5(const BhRuns &bh) {
  const int ts = bh.ts.cost.cnot_count, sd = bh.sd.cost.cnot_count,
            sdt = bh.sdt.cost.cnot_count;
  const double ratio = static_cast<double>(sdt) / ts;
  return {ts < sd && sd < sdt && ratio >= kCostRatio,
          fmt::format("CNOT ts = {}, sd = {}, sdt = {}, sdt/ts = {:.2f}", ts, sd, sdt, ratio)};
}

Outcome criterion6(const std::string &root) {
  int checked = 0, failed = 0;
  for (const char *id : {"h4_1.0", "h4_1.5", "bh_2.25"}) {
    const auto ints = load(root, id);
    const auto occ = make_indexing(ints);
    for (std::uint64_t seed : {0ULL, 1ULL}) {
      ProtocolConfig pc;
      pc.seed = seed;
      const auto ts = run_ts_loop(ints, pc);
      for (const auto &it : ts.trace.iterations)
        for (const auto &acc : it.accepted) {
          const auto &f = acc.factorization;
          const auto lambda = oracle::verify_factorization(f.scatterers.front(), acc.parent_double,
                                                           f.target, occ.n_spin);
          ++checked;
          if (!lambda || std::abs(std::abs(*lambda) - 1.0) > kCouplingTol ||
              std::abs(*lambda - f.coupling) > kCouplingTol)
            ++failed;
        }
    }
  }
  return {checked > 0 && failed == 0,
          fmt::format("{} accepted factorizations checked on H4 1.0/1.5 and BH 2.25, {} failed",
                      checked, failed)};
}

// Independent bilinear energy for the brute-force marginal.
double raw_energy(const RbmModel &m, Bits v, Bits h) {
  double e = 0.0;
  for (int j = 0; j < m.n_visible(); ++j)
    if ((v >> j) & 1U)
      e -= m.b(j);
  for (int i = 0; i < m.n_hidden(); ++i) {
    if (!((h >> i) & 1U))
      continue;
    e -= m.c(i);
    for (int j = 0; j < m.n_visible(); ++j)
      if ((v >> j) & 1U)
        e -= m.W(i, j);
  }
  return e;
}

std::vector<double> model_marginal(const RbmModel &m) {
  std::vector<double> p(std::size_t{1} << m.n_visible());
  double z = 0.0;
  for (Bits v = 0; v < p.size(); ++v)
    z += p[v] = std::exp(-m.free_energy(v));
  for (auto &x : p)
    x /= z;
  return p;
}

double support_kl(const RbmModel &m, const TrainingSet &data) {
  const auto p = model_marginal(m);
  double z = 0.0;
  for (const auto &e : data.entries())
    z += p[e.bits];
  double kl = 0.0;
  for (const auto &e : data.entries())
    kl += e.probability * std::log(e.probability / (p[e.bits] / z));
  return kl;
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (auto [nv, nh] : {std::pair{6, 6}, {8, 4}, {4, 8}, {5, 7}}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto m = RbmModel::random(nv, nh, seed, 0.8);
      Rng rng(seed + 17);
      std::normal_distribution<double> g(0.0, 0.8);
      for (int j = 0; j < nv; ++j)
        m.b(j) = g(rng);
      for (int i = 0; i < nh; ++i)
        m.c(i) = g(rng);
      std::vector<double> brute(std::size_t{1} << nv, 0.0);
      double z = 0.0;
      for (Bits v = 0; v < brute.size(); ++v)
        for (Bits h = 0; h < (Bits{1} << nh); ++h) {
          const double w = std::exp(-raw_energy(m, v, h));
          brute[v] += w;
          z += w;
        }
      const auto fe = model_marginal(m);
      for (std::size_t v = 0; v < brute.size(); ++v)
        worst = std::max(worst, std::abs(brute[v] / z - fe[v]));
    }
  }

  TrainingSet data;
  data.add(0b000111, 0.7);
  data.add(0b000110, 0.3);
  data.normalize();
  constexpr int kSeeds = 5, kEpochs = 2000;
  double kl0 = 0.0, kl1 = 0.0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto m0 = RbmModel::random(6, 6, 100 + seed);
    m0.b(0) = -2.0;
    RbmHyper hyper;
    hyper.epochs = kEpochs;
    hyper.seed = seed;
    kl0 += support_kl(m0, data) / kSeeds;
    kl1 += support_kl(train_cd(m0, data, hyper), data) / kSeeds;
  }
  const double t = seconds_since(t0);
  return {worst <= kMarginalTol && kl1 < kl0 && t < kRbmSeconds,
          fmt::format("marginal error {:.2e}; mean KL {:.4f} -> {:.4f} over {} seeds; {:.1f} s",
                      worst, kl0, kl1, kSeeds, t)};
}

Outcome criterion8(const std::string &root, int replicas) {
  const auto t0 = Clock::now();
  cli::NoisyConfig n;
  n.base = bh_config(root, 0);
  n.base.optimizer = cli::OptimizerKind::spsa;
  auto &noise = n.base.protocol.noise;
  noise.mode = NoiseMode::shot_gaussian;
  noise.p1 = kP1;
  noise.p2 = kP2;
  noise.p_readout = kReadout;
  noise.shots = kShots;
  n.base.protocol.spsa.max_iter = kSpsaIterations;
  n.replicas = replicas;
  n.families = {{cli::Family::rbm_ts, false}, {cli::Family::duccsd, false},
                {cli::Family::duccsdt, false}};
  const auto s = cli::run_noisy(load(root, "bh_2.25"), n);
  const double ts = s[0].mean_final(), sd = s[1].mean_final(), sdt = s[2].mean_final();
  return {replicas >= kNoisyReplicasMin && ts < sd && sd < sdt,
          fmt::format("{} replicas x {} SPSA iterations: mean E ts = {:.6f}, sd = {:.6f}, "
                      "sdt = {:.6f} (exact at final params {:.6f}, {:.6f}, {:.6f}); {:.0f} s",
                      replicas, kSpsaIterations, ts, sd, sdt, s[0].mean_exact(),
                      s[1].mean_exact(), s[2].mean_exact(), seconds_since(t0))};
}

Outcome criterion9(const std::string &root) {
  const auto base = fs::temp_directory_path() / "rbmducc_acceptance_repro";
  fs::remove_all(base);
  std::vector<std::string> traces;
  for (const char *run : {"a", "b"}) {
    auto c = bh_config(root, 7);
    c.out_dir = (base / run).string();
    std::ostringstream log;
    if (cli::cmd_run(c, log) != cli::kExitOk)
      return {false, "run failed: " + log.str()};
    std::ifstream in(base / run / "trace.json", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    traces.push_back(ss.str());
  }
  const bool same = traces[0] == traces[1] && !traces[0].empty();
  return {same, fmt::format("BH 2.25 trace.json {} bytes, digests {} / {}", traces[0].size(),
                            cli::digest(traces[0]), cli::digest(traces[1]))};
}

Outcome criterion10(const std::string &root) {
  double worst = 0.0;
  int n = 0;
  for (const auto &id : cli::list_assets(root)) {
    const auto ints = load(root, id);
    const auto occ = make_indexing(ints);
    worst = std::max(worst, std::abs(mp2_energy(ints, occ) - oracle::mp2_bruteforce(ints, occ)));
    ++n;
  }
  return {n > 0 && worst <= kMp2Tol, fmt::format("{} assets, max |dE_MP2| = {:.2e}", n, worst)};
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"rbmducc acceptance criteria"};
  std::string assets;
  std::vector<int> only;
  int replicas = kNoisyReplicasMin;
  int threads = 0;
  app.add_option("--assets", assets, "Asset directory");
  app.add_option("--only", only, "Criteria to run (default all)")->delimiter(',');
  app.add_option("--replicas", replicas, "Noisy replicas for criterion 8")->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads");
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::err);
  kernels::set_threads(threads);
  const auto root = cli::resolve_asset_root(assets);
  const std::set<int> wanted(only.begin(), only.end());
  auto selected = [&](int k) { return wanted.empty() || wanted.count(k) > 0; };

  std::optional<BhRuns> bh;
  auto bh_runs = [&]() -> const BhRuns & {
    if (!bh) {
      BhRuns r;
      r.ints = load(root, "bh_2.25");
      r.fci = fci_energy(r.ints);
      const auto c = bh_config(root, 0);
      r.ts = cli::run_family(r.ints, cli::Family::rbm_ts, c);
      r.sd = cli::run_family(r.ints, cli::Family::duccsd, c);
      r.sdt = cli::run_family(r.ints, cli::Family::duccsdt, c);
      bh = std::move(r);
    }
    return *bh;
  };

  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"oracle equivalence", [&] { return criterion1(root); }}},
      {2, {"two-electron exactness", [&] { return criterion2(root); }}},
      {3, {"BH energy accuracy", [&] { return criterion3(bh_runs()); }}},
      {4, {"BH overlap", [&] { return criterion4(bh_runs()); }}},
      {5, {"CNOT ordering", [&] { return criterion5(bh_runs()); }}},
      {6, {"scatterer algebra", [&] { return criterion6(root); }}},
      {7, {"RBM correctness", [] { return criterion7(); }}},
      {8, {"noisy ordering", [&] { return criterion8(root, replicas); }}},
      {9, {"reproducibility", [&] { return criterion9(root); }}},
      {10, {"MP2 validation", [&] { return criterion10(root); }}},
  };

  int failures = 0;
  for (const auto &[k, entry] : criteria) {
    if (!selected(k))
      continue;
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << fmt::format("{} criterion {:>2} ({}): {}", o.pass ? "PASS" : "FAIL", k,
                             entry.first, o.detail)
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

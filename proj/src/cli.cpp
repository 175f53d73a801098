// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rbmducc/jordan_wigner.hpp"
#include "rbmducc/oracle.hpp"
#include "rbmducc/random.hpp"

#ifndef RBMDUCC_DEFAULT_ASSET_ROOT
#define RBMDUCC_DEFAULT_ASSET_ROOT "assets"
#endif
#ifndef RBMDUCC_VERSION
#define RBMDUCC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace rbmducc::cli {

namespace {

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double geometry_of(const std::string &id) {
  const auto pos = id.rfind('_');
  if (pos == std::string::npos)
    return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(id.substr(pos + 1));
  } catch (const std::exception &) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

nlohmann::json asset_manifest(const std::string &root) {
  const fs::path p = fs::path(root) / "manifest.json";
  if (!fs::exists(p))
    return nlohmann::json::object();
  return nlohmann::json::parse(read_file(p));
}

double hf_energy(const MolecularIntegrals &ints) {
  const auto occ = make_indexing(ints);
  return Observable(jw_hamiltonian(ints, occ)).value(prepare_reference(occ));
}

struct Optimized {
  std::vector<double> params;
  double energy = 0.0;
  Statevector state;
  OptimizerResult optimizer;
};

Optimized optimize(const MolecularIntegrals &ints, const OrderedAnsatz &ansatz,
                   const RunConfig &config, std::span<const double> init) {
  const auto occ = make_indexing(ints);
  ObjectiveSpec spec{jw_hamiltonian(ints, occ), ansatz, prepare_reference(occ),
                     config.protocol.noise};
  Objective obj(spec);
  Optimized out;
  if (config.optimizer == OptimizerKind::cg) {
    out.optimizer = minimize_cg(obj, init, config.protocol.cg);
    out.params = out.optimizer.best_params;
  } else {
    out.optimizer = minimize_spsa(obj, init, config.protocol.spsa);
    out.params = out.optimizer.final_params;
  }
  out.energy = obj.exact(out.params);
  out.state = obj.state(out.params);
  return out;
}

nlohmann::json manifest_json(const std::string &command, const nlohmann::json &config,
                             const std::vector<std::pair<std::string, std::string>> &outputs) {
  const auto &p = config.contains("protocol") ? config["protocol"] : config;
  nlohmann::json seeds = nlohmann::json::object();
  if (p.contains("seed"))
    seeds["protocol"] = p["seed"];
  if (p.contains("noise") && p["noise"].contains("seed"))
    seeds["noise"] = p["noise"]["seed"];
  if (p.contains("spsa") && p["spsa"].contains("seed"))
    seeds["spsa"] = p["spsa"]["seed"];
  nlohmann::json files = nlohmann::json::object();
  for (const auto &[name, content] : outputs)
    files[name] = digest(content);
  return {{"schema", "rbmducc.manifest/1"},
          {"command", command},
          {"code_version", RBMDUCC_VERSION},
          {"config", config},
          {"config_hash", digest(config.dump())},
          {"seeds", seeds},
          {"outputs", files}};
}

void write_outputs(const fs::path &dir, const std::string &command, const nlohmann::json &config,
                   const std::vector<std::pair<std::string, std::string>> &outputs) {
  fs::create_directories(dir);
  for (const auto &[name, content] : outputs)
    write_file_atomic((dir / name).string(), content);
  write_file_atomic((dir / "manifest.json").string(),
                    manifest_json(command, config, outputs).dump(2) + "\n");
}

template <class F> int guarded(std::ostream &log, F &&body) {
  try {
    return body();
  } catch (const AssetError &e) {
    log << "error: " << e.what() << "\n";
    return kExitAssets;
  } catch (const ConfigError &e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ModeError &e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

} // namespace

// ---------------------------------------------------------------------------
// Names and assets
// ---------------------------------------------------------------------------

const char *to_string(Family f) noexcept {
  switch (f) {
  case Family::duccsd:
    return "duccsd";
  case Family::duccsdt:
    return "duccsdt";
  case Family::rbm_ts:
    return "rbm-ts";
  case Family::rbm_tsqs:
    return "rbm-tsqs";
  }
  return "?";
}

const char *to_string(OptimizerKind o) noexcept {
  return o == OptimizerKind::cg ? "cg" : "spsa";
}

Family parse_family(const std::string &s) {
  for (auto f : {Family::duccsd, Family::duccsdt, Family::rbm_ts, Family::rbm_tsqs})
    if (s == to_string(f))
      return f;
  throw ConfigError("unknown family '" + s + "' (duccsd, duccsdt, rbm-ts, rbm-tsqs)");
}

OptimizerKind parse_optimizer(const std::string &s) {
  if (s == "cg")
    return OptimizerKind::cg;
  if (s == "spsa")
    return OptimizerKind::spsa;
  throw ConfigError("unknown optimizer '" + s + "' (cg, spsa)");
}

std::string to_string(const NoisyFamily &f) {
  if (f.family == Family::rbm_ts)
    return f.prepare_under_noise ? "rbm-ts-1" : "rbm-ts-2";
  return to_string(f.family);
}

NoisyFamily parse_noisy_family(const std::string &s) {
  if (s == "rbm-ts-1")
    return {Family::rbm_ts, true};
  if (s == "rbm-ts-2")
    return {Family::rbm_ts, false};
  if (s == "duccsd")
    return {Family::duccsd, false};
  if (s == "duccsdt")
    return {Family::duccsdt, false};
  throw ConfigError("unknown noisy family '" + s + "' (rbm-ts-1, rbm-ts-2, duccsd, duccsdt)");
}

std::string resolve_asset_root(const std::string &flag) {
  if (!flag.empty())
    return flag;
  if (const char *env = std::getenv(kAssetEnv); env && *env)
    return env;
  return RBMDUCC_DEFAULT_ASSET_ROOT;
}

std::vector<std::string> list_assets(const std::string &asset_root) {
  std::vector<std::string> ids;
  const auto m = asset_manifest(asset_root);
  if (!m.empty()) {
    for (const auto &[id, _] : m.items())
      ids.push_back(id);
  } else if (fs::is_directory(asset_root)) {
    for (const auto &e : fs::directory_iterator(asset_root))
      if (e.path().extension() == ".fcidump")
        ids.push_back(e.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> sweep_ids(const std::string &asset_root, const std::string &molecule) {
  std::vector<std::string> ids;
  for (const auto &id : list_assets(asset_root))
    if (id.rfind(molecule + "_", 0) == 0 && !std::isnan(geometry_of(id)))
      ids.push_back(id);
  if (ids.empty())
    throw AssetError(fmt::format("no geometries for '{}' under {}", molecule, asset_root));
  std::stable_sort(ids.begin(), ids.end(), [](const std::string &a, const std::string &b) {
    return geometry_of(a) < geometry_of(b);
  });
  return ids;
}

std::string resolve_system(const std::string &asset_root, const std::string &name) {
  if (fs::exists(fs::path(asset_root) / (name + ".fcidump")))
    return name;
  const auto m = asset_manifest(asset_root);
  std::string best;
  double best_hf = std::numeric_limits<double>::infinity();
  for (const auto &id : list_assets(asset_root)) {
    if (id.rfind(name + "_", 0) != 0)
      continue;
    const double hf = m.contains(id) && m[id].contains("pyscf_hf_energy")
                          ? m[id]["pyscf_hf_energy"].get<double>()
                          : hf_energy(parse_fcidump((fs::path(asset_root) / (id + ".fcidump"))
                                                      .string()));
    if (hf < best_hf) {
      best_hf = hf;
      best = id;
    }
  }
  if (best.empty())
    throw AssetError(fmt::format("no asset '{}' under {}", name, asset_root));
  return best;
}

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

std::string RunConfig::integrals_path() const {
  if (!fcidump.empty()) {
    if (!fs::exists(fcidump))
      throw AssetError("FCIDUMP not found: " + fcidump);
    return fcidump;
  }
  const auto id = resolve_system(asset_root, system);
  return (fs::path(asset_root) / (id + ".fcidump")).string();
}

void RunConfig::validate() const {
  if (system.empty() && fcidump.empty())
    throw ConfigError("one of system or fcidump is required");
  if (optimizer == OptimizerKind::cg && protocol.noise.mode != NoiseMode::noiseless)
    throw ConfigError("cg requires noiseless mode; use spsa with noise");
  protocol.validate();
  protocol.noise.validate();
  (void)integrals_path();
}

nlohmann::json to_json(const RunConfig &c) {
  return {{"system", c.system},
          {"fcidump", c.fcidump},
          {"family", to_string(c.family)},
          {"optimizer", to_string(c.optimizer)},
          {"protocol", to_json(c.protocol)}};
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

FamilyResult run_family(const MolecularIntegrals &ints, Family family, const RunConfig &config) {
  const auto occ = make_indexing(ints);
  const bool noisy = config.protocol.noise.mode != NoiseMode::noiseless;
  FamilyResult out;
  out.family = family;

  auto finish = [&](OrderedAnsatz ansatz, std::span<const double> init) {
    auto r = optimize(ints, ansatz, config, init);
    out.cost = cnot_cost(ansatz, occ.n_spin);
    out.ansatz = std::move(ansatz);
    out.energy = r.energy;
    out.params = std::move(r.params);
    out.state = std::move(r.state);
    out.optimizer = std::move(r.optimizer);
  };

  if (family == Family::duccsd || family == Family::duccsdt) {
    auto ansatz = build_conventional(occ, family == Family::duccsd ? 2 : 3);
    const std::vector<double> zero(ansatz.size(), 0.0);
    finish(std::move(ansatz), zero);
    return out;
  }

  auto pc = config.protocol;
  auto ts = run_ts_loop(ints, pc);
  const bool warm = pc.warm_start && !noisy;
  auto init = initial_parameters(ts.ansatz, ts.step1.pool, ts.step1.params, warm);
  finish(ts.ansatz, init);
  ts.trace.final_energy = out.energy;

  if (family == Family::rbm_tsqs) {
    pc.target_rank = 4;
    auto loop = run_tsqs_extension(out.ansatz, out.state, ints, pc, ts.model);
    ts.trace.quadruple_iterations = std::move(loop.iterations);
    ts.trace.truncated = ts.trace.truncated || loop.truncated;
    auto init4 = initial_parameters(loop.ansatz, out.ansatz, out.params, warm);
    finish(std::move(loop.ansatz), init4);
    ts.trace.final_energy = out.energy;
  }
  out.trace = std::move(ts.trace);
  return out;
}

int cmd_run(const RunConfig &config, std::ostream &log) {
  return guarded(log, [&] {
    config.validate();
    const auto path = config.integrals_path();
    const auto ints = parse_fcidump(path);
    const auto occ = make_indexing(ints);
    const auto fci = oracle::fci_ground(ints, occ).energy;
    const auto hf = hf_energy(ints);
    const auto r = run_family(ints, config.family, config);

    const std::string system =
        config.fcidump.empty() ? resolve_system(config.asset_root, config.system)
                               : fs::path(config.fcidump).stem().string();
    nlohmann::json energies = {
        {"schema", "rbmducc.energies/1"},
        {"system", system},
        {"family", to_string(config.family)},
        {"optimizer", to_string(config.optimizer)},
        {"noise_mode", to_string(config.protocol.noise.mode)},
        {"energy_hartree", r.energy},
        {"measured_energy_hartree", r.optimizer.final_energy},
        {"fci_energy_hartree", fci},
        {"hf_energy_hartree", hf},
        {"error_hartree", r.energy - fci},
        {"cnot_count", r.cost.cnot_count},
        {"single_qubit_count", r.cost.single_qubit_count},
        {"n_parameters", r.ansatz.size()},
        {"iterations", r.optimizer.iterations},
        {"evaluations", r.optimizer.evaluations},
        {"converged", r.optimizer.converged}};

    nlohmann::json trace;
    if (r.trace) {
      trace = to_json(*r.trace);
    } else {
      trace = {{"schema", "rbmducc.trace/1"}, {"iterations", nlohmann::json::array()}};
    }
    trace["family"] = to_string(config.family);
    trace["ansatz"] = to_json(r.ansatz);

    write_outputs(config.out_dir, "run", to_json(config),
                  {{"energies.json", energies.dump(2) + "\n"},
                   {"trace.json", trace.dump(2) + "\n"},
                   {"trajectory.csv", trajectory_csv(r.optimizer)}});
    log << fmt::format("{} {}: E = {:.10f}  E-E_FCI = {:.3e}  CNOT = {}\n", system,
                       to_string(config.family), r.energy, r.energy - fci, r.cost.cnot_count);
    return kExitOk;
  });
}

int cmd_compare(const CompareConfig &config, std::ostream &log) {
  return guarded(log, [&] {
    std::vector<std::string> ids;
    if (!config.systems.empty()) {
      for (const auto &s : config.systems)
        ids.push_back(resolve_system(config.base.asset_root, s));
    } else {
      if (config.molecule.empty())
        throw AssetError("empty sweep: give a molecule or a list of systems");
      ids = sweep_ids(config.base.asset_root, config.molecule);
    }
    if (config.families.empty())
      throw ConfigError("no families selected");
    if (config.base.optimizer == OptimizerKind::cg &&
        config.base.protocol.noise.mode != NoiseMode::noiseless)
      throw ConfigError("cg requires noiseless mode; use spsa with noise");
    config.base.protocol.validate();

    std::ostringstream csv;
    csv << "system,geometry";
    for (const char *col : {"energy", "error", "cnot"})
      for (auto f : config.families)
        csv << ',' << col << '_' << to_string(f);
    csv << '\n';
    for (const auto &id : ids) {
      const auto ints =
          parse_fcidump((fs::path(config.base.asset_root) / (id + ".fcidump")).string());
      const auto fci = oracle::fci_ground(ints, make_indexing(ints)).energy;
      std::vector<FamilyResult> rs;
      for (auto f : config.families)
        rs.push_back(run_family(ints, f, config.base));
      csv << id << ',' << fmt::format("{}", geometry_of(id));
      for (const auto &r : rs)
        csv << ',' << fmt::format("{:.12f}", r.energy);
      for (const auto &r : rs)
        csv << ',' << fmt::format("{:.6e}", r.energy - fci);
      for (const auto &r : rs)
        csv << ',' << r.cost.cnot_count;
      csv << '\n';
      log << fmt::format("{} done\n", id);
    }
    auto cfg = to_json(config.base);
    cfg["systems"] = ids;
    auto fams = nlohmann::json::array();
    for (auto f : config.families)
      fams.push_back(to_string(f));
    cfg["families"] = fams;
    const std::string name =
        "compare_" + (config.molecule.empty() ? std::string("systems") : config.molecule) + ".csv";
    write_outputs(config.base.out_dir, "compare", cfg, {{name, csv.str()}});
    return kExitOk;
  });
}

double NoisyFamilySummary::mean_final() const {
  return final_energies.empty() ? 0.0
                                : std::accumulate(final_energies.begin(), final_energies.end(),
                                                  0.0) / static_cast<double>(final_energies.size());
}

double NoisyFamilySummary::mean_exact() const {
  return exact_energies.empty() ? 0.0
                                : std::accumulate(exact_energies.begin(), exact_energies.end(),
                                                  0.0) / static_cast<double>(exact_energies.size());
}

std::vector<NoisyFamilySummary> run_noisy(const MolecularIntegrals &ints,
                                          const NoisyConfig &config) {
  if (config.base.optimizer != OptimizerKind::spsa)
    throw ConfigError("noisy runs require spsa");
  if (config.replicas < 1)
    throw ConfigError("replicas must be >= 1");
  config.base.protocol.validate();
  config.base.protocol.noise.validate();
  const auto occ = make_indexing(ints);
  const auto hamiltonian = jw_hamiltonian(ints, occ);
  const auto reference = prepare_reference(occ);

  std::vector<NoisyFamilySummary> out;
  for (const auto &fam : config.families) {
    OrderedAnsatz ansatz;
    if (fam.family == Family::duccsd || fam.family == Family::duccsdt) {
      ansatz = build_conventional(occ, fam.family == Family::duccsd ? 2 : 3);
    } else if (fam.family == Family::rbm_ts) {
      auto pc = config.base.protocol;
      pc.prepare_under_noise = fam.prepare_under_noise;
      ansatz = run_ts_loop(ints, pc).ansatz;
    } else {
      throw ConfigError("rbm-tsqs is not a noisy family");
    }

    NoisyFamilySummary s;
    s.family = fam;
    s.cnot_count = cnot_cost(ansatz, occ.n_spin).cnot_count;
    const auto n = static_cast<std::size_t>(config.replicas);
    s.final_energies.assign(n, 0.0);
    s.exact_energies.assign(n, 0.0);
    s.trajectories.assign(n, {});
    const std::vector<double> zero(ansatz.size(), 0.0);
    const int replicas = config.replicas;

#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < replicas; ++r) {
      const auto ur = static_cast<std::uint64_t>(r);
      ObjectiveSpec spec{hamiltonian, ansatz, reference, config.base.protocol.noise};
      spec.noise.seed = derive_seed(config.base.protocol.noise.seed, ur);
      auto spsa = config.base.protocol.spsa;
      spsa.seed = derive_seed(config.base.protocol.spsa.seed, ur);
      Objective obj(spec);
      const auto res = minimize_spsa(obj, zero, spsa);
      const auto idx = static_cast<std::size_t>(r);
      s.final_energies[idx] = res.final_energy;
      s.exact_energies[idx] = obj.exact(res.final_params);
      auto &traj = s.trajectories[idx];
      traj.reserve(res.trajectory.size());
      for (const auto &p : res.trajectory)
        traj.push_back(p.energy);
    }

    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto &t : s.trajectories)
      len = std::min(len, t.size());
    s.mean_trajectory.assign(len, 0.0);
    for (const auto &t : s.trajectories)
      for (std::size_t k = 0; k < len; ++k)
        s.mean_trajectory[k] += t[k] / static_cast<double>(n);
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_noisy(const NoisyConfig &config, std::ostream &log) {
  return guarded(log, [&] {
    if (config.base.optimizer != OptimizerKind::spsa)
      throw ConfigError("noisy runs require spsa; cg is not allowed");
    if (config.families.empty())
      throw ConfigError("no families selected");
    const auto path = config.base.integrals_path();
    const auto ints = parse_fcidump(path);
    const auto summaries = run_noisy(ints, config);

    std::vector<std::pair<std::string, std::string>> outputs;
    nlohmann::json summary = {{"schema", "rbmducc.noisy/1"},
                              {"replicas", config.replicas},
                              {"families", nlohmann::json::array()}};
    for (const auto &s : summaries) {
      const auto name = to_string(s.family);
      for (std::size_t r = 0; r < s.trajectories.size(); ++r) {
        std::string csv = "eval_index,energy_hartree\n";
        for (std::size_t k = 0; k < s.trajectories[r].size(); ++k)
          csv += fmt::format("{},{:.12f}\n", k, s.trajectories[r][k]);
        outputs.emplace_back(fmt::format("{}_replica_{}.csv", name, r), std::move(csv));
      }
      std::string mean = "eval_index,mean_energy_hartree\n";
      for (std::size_t k = 0; k < s.mean_trajectory.size(); ++k)
        mean += fmt::format("{},{:.12f}\n", k, s.mean_trajectory[k]);
      outputs.emplace_back(name + "_mean.csv", std::move(mean));
      summary["families"].push_back({{"family", name},
                                     {"cnot_count", s.cnot_count},
                                     {"mean_final_energy_hartree", s.mean_final()},
                                     {"mean_exact_energy_hartree", s.mean_exact()},
                                     {"final_energies_hartree", s.final_energies},
                                     {"exact_energies_hartree", s.exact_energies}});
      log << fmt::format("{}: CNOT = {}  mean final E = {:.8f}  mean exact E = {:.8f}\n", name,
                         s.cnot_count, s.mean_final(), s.mean_exact());
    }
    outputs.emplace_back("noisy_summary.json", summary.dump(2) + "\n");

    auto cfg = to_json(config.base);
    cfg["replicas"] = config.replicas;
    auto fams = nlohmann::json::array();
    for (const auto &f : config.families)
      fams.push_back(to_string(f));
    cfg["families"] = fams;
    write_outputs(config.base.out_dir, "noisy", cfg, outputs);
    return kExitOk;
  });
}

int cmd_oracle(const std::string &asset_root, const std::string &out_path,
               const std::vector<std::string> &ids, std::ostream &log) {
  return guarded(log, [&] {
    auto list = ids.empty() ? list_assets(asset_root) : ids;
    if (list.empty())
      throw AssetError("no assets under " + asset_root);
    oracle::GoldenStore store;
    for (const auto &id : list) {
      const fs::path p = fs::path(asset_root) / (id + ".fcidump");
      if (!fs::exists(p))
        throw AssetError("missing asset " + p.string());
      store[id] = oracle::compute_golden(parse_fcidump(p.string()));
      log << fmt::format("{}: E_FCI = {:.12f}\n", id, store[id].fci_energy);
    }
    const auto target = out_path.empty() ? (fs::path(asset_root) / "golden.json").string()
                                         : out_path;
    oracle::save_golden(store, target);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string digest(const std::string &text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

void write_file_atomic(const std::string &path, const std::string &content) {
  const fs::path target(path);
  if (target.has_parent_path())
    fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out)
      throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

} // namespace rbmducc::cli

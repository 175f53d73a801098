// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file simulator.hpp
 * @brief Statevector simulation of ordered exponential ansatzes.
 *
 * Each generator is mapped to qubits and, when its Pauli strings commute,
 * applied exactly as a product of closed-form rotations. Gate noise is
 * modelled either as a global depolarizing damping (shot-gaussian mode) or by
 * sampling Pauli errors on the gates of the staircase circuit (trajectory
 * mode); readout errors damp each Pauli term by (1 - 2 p)^weight.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rbmducc/ansatz.hpp"
#include "rbmducc/configuration.hpp"
#include "rbmducc/kernels.hpp"
#include "rbmducc/pauli.hpp"
#include "rbmducc/random.hpp"

namespace rbmducc {

class Statevector {
public:
  Statevector() = default;
  explicit Statevector(int n_qubits);
  static Statevector basis(int n_qubits, Bits k);

  [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
  [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amps_; }
  [[nodiscard]] std::span<const cplx> amplitudes() const noexcept { return amps_; }
  [[nodiscard]] cplx operator[](std::size_t k) const { return amps_[k]; }
  [[nodiscard]] double norm() const;

  friend bool operator==(const Statevector &, const Statevector &) = default;

private:
  int n_qubits_ = 0;
  std::vector<cplx> amps_;
};

[[nodiscard]] Statevector prepare_reference(const SpinOrbitalIndexing &indexing);

/// |<a|b>|. Throws DimensionError on mismatched qubit counts.
[[nodiscard]] double overlap(const Statevector &a, const Statevector &b);

enum class NoiseMode { noiseless, shot_gaussian, trajectory };

[[nodiscard]] const char *to_string(NoiseMode m) noexcept;
[[nodiscard]] NoiseMode parse_noise_mode(const std::string &s);

struct NoiseConfig {
  double p1 = 0.0;
  double p2 = 0.0;
  double p_readout = 0.0;
  int shots = 10000;
  NoiseMode mode = NoiseMode::noiseless;
  int trajectories = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError when a probability leaves [0,1] or counts are < 1.
  void validate() const;
};

/// One exp(i angle * weight * P) rotation in a generator's product.
struct PauliRotation {
  Bits x = 0;
  Bits z = 0;
  double weight = 0.0;
};

/// Gates of one Pauli-string exponential in the staircase circuit.
struct NoiseSite {
  Bits qubits = 0;
  int count = 0;
};

/// Qubit image of a generator ready for repeated application.
struct CompiledGenerator {
  Generator generator;
  PauliSum image;
  std::vector<PauliRotation> rotations;
  bool commuting = true;
  /// Dense generator used when the strings do not commute.
  std::optional<Eigen::MatrixXcd> dense;
  int cnots = 0;
  int single_qubit_gates = 0;
  std::vector<NoiseSite> cnot_sites;
  std::vector<NoiseSite> single_sites;
};

/// Largest qubit count for the dense non-commuting fallback.
inline constexpr int kDenseFallbackQubits = 11;

/// Throws NonCommutingError when the strings do not commute and the register
/// is too large for the dense fallback.
[[nodiscard]] CompiledGenerator compile_generator(const Generator &gen, int n_qubits);
/// Same, for an arbitrary anti-hermitian Pauli sum (generator field left empty).
[[nodiscard]] CompiledGenerator compile_pauli_generator(const PauliSum &image, int n_qubits);

void apply_exponential(Statevector &state, const CompiledGenerator &gen, double angle);
/// state <- K state for the generator K.
void apply_generator(Statevector &state, const CompiledGenerator &gen);
[[nodiscard]] Statevector apply_exponential(Statevector state, const Generator &gen,
                                            double angle);

class CompiledAnsatz {
public:
  CompiledAnsatz() = default;
  CompiledAnsatz(const OrderedAnsatz &ansatz, int n_qubits);

  [[nodiscard]] std::size_t size() const noexcept { return factors_.size(); }
  [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] const std::vector<CompiledGenerator> &factors() const noexcept {
    return factors_;
  }
  [[nodiscard]] const CompiledGenerator &operator[](std::size_t i) const { return factors_[i]; }

private:
  int n_qubits_ = 0;
  std::vector<CompiledGenerator> factors_;
};

/// Applies the factors in list order (first factor acts first).
/// Throws ArityError when params.size() differs from the factor count.
void apply_ansatz(Statevector &state, const CompiledAnsatz &ansatz,
                  std::span<const double> params);
[[nodiscard]] Statevector apply_ansatz(Statevector state, const OrderedAnsatz &ansatz,
                                       std::span<const double> params);

/// Compiled Hamiltonian with exact and readout-damped term sets.
class Observable {
public:
  Observable() = default;
  /// Throws HermiticityError for a non-hermitian operator.
  Observable(const PauliSum &op, double p_readout = 0.0);

  [[nodiscard]] const PauliSum &op() const noexcept { return op_; }
  [[nodiscard]] int n_qubits() const noexcept { return op_.n_qubits(); }
  [[nodiscard]] double constant() const noexcept { return op_.constant().real(); }
  [[nodiscard]] double p_readout() const noexcept { return p_readout_; }
  [[nodiscard]] const kernels::CompiledObservable &exact() const noexcept { return exact_; }
  [[nodiscard]] const kernels::CompiledObservable &measured() const noexcept {
    return measured_;
  }

  /// <psi|O|psi> and <psi|O^2|psi>, using the readout-damped terms if asked.
  [[nodiscard]] std::pair<double, double> moments(const Statevector &psi,
                                                  bool with_readout) const;
  [[nodiscard]] double value(const Statevector &psi, bool with_readout = false) const {
    return moments(psi, with_readout).first;
  }
  /// O|psi> with the exact terms.
  void apply(const Statevector &psi, std::span<cplx> out) const;

private:
  PauliSum op_;
  double p_readout_ = 0.0;
  kernels::CompiledObservable exact_;
  kernels::CompiledObservable measured_;
};

/// State-level expectation. noiseless: exact. shot_gaussian: readout-damped
/// value plus Gaussian noise of deviation sqrt(max(var,0)/shots). trajectory:
/// readout-damped value (gate noise needs a circuit, see NoisyEstimator).
[[nodiscard]] double expectation(const Statevector &state, const Observable &op,
                                 const NoiseConfig &noise, Rng &rng);
[[nodiscard]] double expectation(const Statevector &state, const PauliSum &op,
                                 const NoiseConfig &noise, Rng &rng);

/// Basis states with |amplitude|^2 >= threshold, descending (ties by bits).
[[nodiscard]] std::vector<Configuration> basis_probabilities(const Statevector &state,
                                                             double threshold);

using Histogram = std::map<Bits, std::int64_t>;

/// Samples `shots` bit-strings from |amplitude|^2 and flips each bit with
/// probability p_readout.
[[nodiscard]] Histogram sample_readout(const Statevector &state, const NoiseConfig &noise,
                                       Rng &rng);
/// `bitstring,count` lines with a header row.
[[nodiscard]] std::string histogram_csv(const Histogram &h, int n_qubits);

struct FactorCost {
  std::string label;
  int cnots = 0;
  int single_qubit = 0;
};

struct GateCostReport {
  int cnot_count = 0;
  int single_qubit_count = 0;
  std::vector<FactorCost> factors;
};

/// Staircase cost: 2(w-1) CNOTs per Pauli string of weight w, two basis
/// changes per X/Y letter and one Z rotation.
[[nodiscard]] GateCostReport cnot_cost(const OrderedAnsatz &ansatz, int n_qubits);
[[nodiscard]] GateCostReport cnot_cost(const CompiledAnsatz &ansatz);
[[nodiscard]] nlohmann::json to_json(const GateCostReport &report);

/// Probability that no depolarizing error fires anywhere in the circuit.
[[nodiscard]] double circuit_fidelity(const GateCostReport &cost, const NoiseConfig &noise);

/// Energy estimator for a fixed ansatz under a noise model. Every stochastic
/// draw comes from the estimator's own generator, seeded from noise.seed.
class NoisyEstimator {
public:
  NoisyEstimator(const PauliSum &hamiltonian, const CompiledAnsatz &ansatz,
                 Statevector reference, NoiseConfig noise);

  [[nodiscard]] double operator()(std::span<const double> params);
  /// Exact energy at params, no noise.
  [[nodiscard]] double exact(std::span<const double> params) const;
  [[nodiscard]] Statevector state(std::span<const double> params) const;
  /// One noisy realisation of the circuit (trajectory sampling).
  [[nodiscard]] Statevector noisy_state(std::span<const double> params);

  [[nodiscard]] const NoiseConfig &noise() const noexcept { return noise_; }
  [[nodiscard]] const GateCostReport &cost() const noexcept { return cost_; }
  [[nodiscard]] const Observable &observable() const noexcept { return obs_; }
  [[nodiscard]] const CompiledAnsatz &ansatz() const noexcept { return ansatz_; }
  [[nodiscard]] Rng &rng() noexcept { return rng_; }

private:
  Observable obs_;
  CompiledAnsatz ansatz_;
  Statevector reference_;
  NoiseConfig noise_;
  GateCostReport cost_;
  double fidelity_ = 1.0;
  Rng rng_;
};

} // namespace rbmducc

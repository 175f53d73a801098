// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "rbmducc/error.hpp"
#include "rbmducc/jordan_wigner.hpp"

namespace rbmducc {

namespace kp = kernels::parallel;

// ---------------------------------------------------------------------------
// Statevector
// ---------------------------------------------------------------------------

Statevector::Statevector(int n_qubits)
    : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits) {
  if (n_qubits < 0 || n_qubits > 30)
    throw ResourceError("statevector qubit count out of range");
  amps_[0] = 1.0;
}

Statevector Statevector::basis(int n_qubits, Bits k) {
  Statevector s(n_qubits);
  s.amps_[0] = 0.0;
  s.amps_.at(k) = 1.0;
  return s;
}

double Statevector::norm() const { return std::sqrt(kp::inner(amps_, amps_).real()); }

Statevector prepare_reference(const SpinOrbitalIndexing &indexing) {
  return Statevector::basis(indexing.n_spin, indexing.reference());
}

double overlap(const Statevector &a, const Statevector &b) {
  if (a.n_qubits() != b.n_qubits())
    throw DimensionError("overlap of states with different qubit counts");
  return std::min(1.0, std::abs(kp::inner(a.amplitudes(), b.amplitudes())));
}

// ---------------------------------------------------------------------------
// Noise configuration
// ---------------------------------------------------------------------------

const char *to_string(NoiseMode m) noexcept {
  switch (m) {
  case NoiseMode::noiseless: return "noiseless";
  case NoiseMode::shot_gaussian: return "shot-gaussian";
  case NoiseMode::trajectory: return "trajectory";
  }
  return "unknown";
}

NoiseMode parse_noise_mode(const std::string &s) {
  if (s == "noiseless")
    return NoiseMode::noiseless;
  if (s == "shot-gaussian" || s == "shot_gaussian")
    return NoiseMode::shot_gaussian;
  if (s == "trajectory")
    return NoiseMode::trajectory;
  throw ConfigError("unknown noise mode: " + s);
}

void NoiseConfig::validate() const {
  for (double p : {p1, p2, p_readout})
    if (!(p >= 0.0 && p <= 1.0))
      throw ConfigError("noise probabilities must lie in [0,1]");
  if (mode != NoiseMode::noiseless && shots < 1)
    throw ConfigError("shots must be >= 1 in noisy modes");
  if (trajectories < 1)
    throw ConfigError("trajectories must be >= 1");
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

CompiledGenerator compile_generator(const Generator &gen, int n_qubits) {
  auto out = compile_pauli_generator(jw_generator(gen, n_qubits), n_qubits);
  out.generator = gen;
  return out;
}

CompiledGenerator compile_pauli_generator(const PauliSum &image, int n_qubits) {
  if (!image.is_antihermitian())
    throw InvalidGeneratorError("generator image is not anti-hermitian");
  CompiledGenerator out;
  out.image = image;
  out.commuting = pauli_mutually_commute(out.image);

  std::map<Bits, int> cnot_sites, single_sites;
  for (const auto &t : out.image.terms()) {
    // K = sum_j (i c_j) P_j, so exp(theta K) = prod_j exp(i theta c_j P_j).
    out.rotations.push_back({t.key.x, t.key.z, t.coefficient.imag()});
    const auto support = indices_of(t.key.x | t.key.z);
    const int w = static_cast<int>(support.size());
    if (w == 0)
      continue;
    out.cnots += 2 * (w - 1);
    for (int q = 0; q + 1 < w; ++q)
      cnot_sites[bit(support[static_cast<std::size_t>(q)]) |
                 bit(support[static_cast<std::size_t>(q + 1)])] += 2;
    for (int q : support)
      if (test_bit(t.key.x, q)) {
        out.single_qubit_gates += 2;
        single_sites[bit(q)] += 2;
      }
    out.single_qubit_gates += 1;
    single_sites[bit(support.back())] += 1;
  }
  for (const auto &[q, c] : cnot_sites)
    out.cnot_sites.push_back({q, c});
  for (const auto &[q, c] : single_sites)
    out.single_sites.push_back({q, c});

  if (!out.commuting) {
    if (n_qubits > kDenseFallbackQubits)
      throw NonCommutingError("generator has non-commuting strings and the register is "
                              "too large for the dense fallback");
    const auto dim = static_cast<Eigen::Index>(Bits{1} << n_qubits);
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto &t : out.image.terms()) {
      const cplx base = std::pow(cplx{0, 1}, popcount(t.key.x & t.key.z));
      for (Eigen::Index col = 0; col < dim; ++col) {
        const auto kb = static_cast<Bits>(col);
        const double sgn = (popcount(kb & t.key.z) & 1) ? -1.0 : 1.0;
        k(static_cast<Eigen::Index>(kb ^ t.key.x), col) += t.coefficient * base * sgn;
      }
    }
    out.dense = std::move(k);
  }
  return out;
}

void apply_exponential(Statevector &state, const CompiledGenerator &gen, double angle) {
  if (angle == 0.0)
    return;
  if (gen.commuting) {
    for (const auto &r : gen.rotations)
      kp::rotate(state.amplitudes(), r.x, r.z, angle * r.weight);
    return;
  }
  const Eigen::MatrixXcd u = (angle * *gen.dense).exp();
  Eigen::Map<Eigen::VectorXcd> v(state.amplitudes().data(),
                                 static_cast<Eigen::Index>(state.dim()));
  const Eigen::VectorXcd out = u * v;
  v = out;
}

void apply_generator(Statevector &state, const CompiledGenerator &gen) {
  std::vector<cplx> acc(state.dim());
  std::vector<cplx> tmp(state.dim());
  for (const auto &r : gen.rotations) {
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), tmp.begin());
    kp::apply_pauli(tmp, r.x, r.z);
    const cplx c{0.0, r.weight};
    for (std::size_t k = 0; k < acc.size(); ++k)
      acc[k] += c * tmp[k];
  }
  std::copy(acc.begin(), acc.end(), state.amplitudes().begin());
}

Statevector apply_exponential(Statevector state, const Generator &gen, double angle) {
  apply_exponential(state, compile_generator(gen, state.n_qubits()), angle);
  return state;
}

CompiledAnsatz::CompiledAnsatz(const OrderedAnsatz &ansatz, int n_qubits) : n_qubits_(n_qubits) {
  factors_.reserve(ansatz.size());
  for (const auto &f : ansatz.factors())
    factors_.push_back(compile_generator(f.generator, n_qubits));
}

void apply_ansatz(Statevector &state, const CompiledAnsatz &ansatz,
                  std::span<const double> params) {
  if (params.size() != ansatz.size())
    throw ArityError(fmt::format("ansatz has {} factors but {} parameters were given",
                                 ansatz.size(), params.size()));
  for (std::size_t i = 0; i < ansatz.size(); ++i)
    apply_exponential(state, ansatz[i], params[i]);
}

Statevector apply_ansatz(Statevector state, const OrderedAnsatz &ansatz,
                         std::span<const double> params) {
  apply_ansatz(state, CompiledAnsatz(ansatz, state.n_qubits()), params);
  return state;
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

Observable::Observable(const PauliSum &op, double p_readout)
    : op_(op), p_readout_(p_readout), exact_(kernels::compile(op)),
      measured_(kernels::compile(op, 1.0 - 2.0 * p_readout)) {
  if (!op.is_hermitian())
    throw HermiticityError("observable is not hermitian");
}

void Observable::apply(const Statevector &psi, std::span<cplx> out) const {
  kp::apply_observable(exact_, psi.amplitudes(), out);
}

std::pair<double, double> Observable::moments(const Statevector &psi,
                                              bool with_readout) const {
  std::vector<cplx> h(psi.dim());
  kp::apply_observable(with_readout ? measured_ : exact_, psi.amplitudes(), h);
  const double mean = kp::inner(psi.amplitudes(), h).real();
  const double second = kp::inner(h, h).real();
  return {mean, second};
}

double expectation(const Statevector &state, const Observable &op, const NoiseConfig &noise,
                   Rng &rng) {
  if (noise.mode == NoiseMode::noiseless)
    return op.value(state);
  const auto [mean, second] = op.moments(state, true);
  if (noise.mode == NoiseMode::trajectory)
    return mean;
  const auto [m_exact, s_exact] = op.moments(state, false);
  const double var = std::max(s_exact - m_exact * m_exact, 0.0);
  std::normal_distribution<double> gauss(0.0, std::sqrt(var / noise.shots));
  return mean + gauss(rng);
}

double expectation(const Statevector &state, const PauliSum &op, const NoiseConfig &noise,
                   Rng &rng) {
  return expectation(state, Observable(op, noise.p_readout), noise, rng);
}

// ---------------------------------------------------------------------------
// Readout
// ---------------------------------------------------------------------------

std::vector<Configuration> basis_probabilities(const Statevector &state, double threshold) {
  std::vector<Configuration> out;
  const auto amps = state.amplitudes();
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double p = std::norm(amps[k]);
    if (p >= threshold && p > 0.0)
      out.push_back({static_cast<Bits>(k), p});
  }
  std::sort(out.begin(), out.end(), [](const Configuration &a, const Configuration &b) {
    return a.probability != b.probability ? a.probability > b.probability : a.bits < b.bits;
  });
  return out;
}

Histogram sample_readout(const Statevector &state, const NoiseConfig &noise, Rng &rng) {
  if (noise.shots < 1)
    throw ConfigError("sampling needs shots >= 1");
  const auto amps = state.amplitudes();
  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    acc += std::norm(amps[k]);
    cdf[k] = acc;
  }
  std::uniform_real_distribution<double> uni(0.0, acc);
  std::bernoulli_distribution flip(noise.p_readout);
  Histogram h;
  for (int s = 0; s < noise.shots; ++s) {
    const double u = uni(rng);
    auto k = static_cast<Bits>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    k = std::min<Bits>(k, amps.size() - 1);
    if (noise.p_readout > 0.0)
      for (int q = 0; q < state.n_qubits(); ++q)
        if (flip(rng))
          k ^= bit(q);
    ++h[k];
  }
  return h;
}

std::string histogram_csv(const Histogram &h, int n_qubits) {
  std::string out = "bitstring,count\n";
  for (const auto &[k, c] : h)
    out += fmt::format("{},{}\n", to_bitstring(k, n_qubits), c);
  return out;
}

// ---------------------------------------------------------------------------
// Cost
// ---------------------------------------------------------------------------

GateCostReport cnot_cost(const CompiledAnsatz &ansatz) {
  GateCostReport r;
  for (const auto &f : ansatz.factors()) {
    r.factors.push_back({f.generator.label(), f.cnots, f.single_qubit_gates});
    r.cnot_count += f.cnots;
    r.single_qubit_count += f.single_qubit_gates;
  }
  return r;
}

GateCostReport cnot_cost(const OrderedAnsatz &ansatz, int n_qubits) {
  return cnot_cost(CompiledAnsatz(ansatz, n_qubits));
}

nlohmann::json to_json(const GateCostReport &report) {
  nlohmann::json factors = nlohmann::json::array();
  for (const auto &f : report.factors)
    factors.push_back({{"label", f.label}, {"cnots", f.cnots}, {"single_qubit", f.single_qubit}});
  return {{"cnot_count", report.cnot_count},
          {"single_qubit_count", report.single_qubit_count},
          {"convention", "staircase 2(w-1) per Pauli string"},
          {"factors", std::move(factors)}};
}

double circuit_fidelity(const GateCostReport &cost, const NoiseConfig &noise) {
  return std::pow(1.0 - noise.p1, cost.single_qubit_count) *
         std::pow(1.0 - noise.p2, cost.cnot_count);
}

// ---------------------------------------------------------------------------
// Noisy estimator
// ---------------------------------------------------------------------------

NoisyEstimator::NoisyEstimator(const PauliSum &hamiltonian, const CompiledAnsatz &ansatz,
                               Statevector reference, NoiseConfig noise)
    : obs_(hamiltonian, noise.p_readout), ansatz_(ansatz), reference_(std::move(reference)),
      noise_(noise), cost_(cnot_cost(ansatz)), rng_(noise.seed) {
  noise_.validate();
  fidelity_ = circuit_fidelity(cost_, noise_);
}

Statevector NoisyEstimator::state(std::span<const double> params) const {
  Statevector psi = reference_;
  apply_ansatz(psi, ansatz_, params);
  return psi;
}

double NoisyEstimator::exact(std::span<const double> params) const {
  return obs_.value(state(params));
}

Statevector NoisyEstimator::noisy_state(std::span<const double> params) {
  if (params.size() != ansatz_.size())
    throw ArityError("parameter count differs from the ansatz length");
  Statevector psi = reference_;
  const auto inject = [&](const std::vector<NoiseSite> &sites, double p, bool two_qubit) {
    if (p <= 0.0)
      return;
    std::uniform_int_distribution<int> pick(1, two_qubit ? 15 : 3);
    for (const auto &site : sites) {
      std::binomial_distribution<int> errors(site.count, p);
      for (int e = errors(rng_); e > 0; --e) {
        const int r = pick(rng_);
        const auto qs = indices_of(site.qubits);
        PauliKey key;
        for (std::size_t j = 0; j < qs.size(); ++j) {
          // letters 0..3 = I, X, Y, Z on each touched qubit
          const int letter = two_qubit ? (j == 0 ? r / 4 : r % 4) : r;
          if (letter == 1 || letter == 2)
            key.x |= bit(qs[j]);
          if (letter == 2 || letter == 3)
            key.z |= bit(qs[j]);
        }
        kp::apply_pauli(psi.amplitudes(), key.x, key.z);
      }
    }
  };
  for (std::size_t i = 0; i < ansatz_.size(); ++i) {
    apply_exponential(psi, ansatz_[i], params[i]);
    inject(ansatz_[i].cnot_sites, noise_.p2, true);
    inject(ansatz_[i].single_sites, noise_.p1, false);
  }
  return psi;
}

double NoisyEstimator::operator()(std::span<const double> params) {
  switch (noise_.mode) {
  case NoiseMode::noiseless:
    return exact(params);
  case NoiseMode::shot_gaussian: {
    const Statevector psi = state(params);
    const auto [m, m2] = obs_.moments(psi, false);
    const double measured = noise_.p_readout > 0.0 ? obs_.value(psi, true) : m;
    const double damped = fidelity_ * measured + (1.0 - fidelity_) * obs_.constant();
    std::normal_distribution<double> gauss(
        0.0, std::sqrt(std::max(m2 - m * m, 0.0) / noise_.shots));
    return damped + gauss(rng_);
  }
  case NoiseMode::trajectory: {
    double acc = 0.0;
    for (int t = 0; t < noise_.trajectories; ++t)
      acc += obs_.value(noisy_state(params), true);
    return acc / noise_.trajectories;
  }
  }
  return exact(params);
}

} // namespace rbmducc

// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file vqe.hpp
 * @brief Variational minimization of ansatz energies.
 *
 * Nonlinear conjugate gradient (Polak-Ribiere+ with a strong-Wolfe line
 * search) for noiseless objectives and SPSA for any noise mode. Every
 * objective evaluation is appended to the trajectory.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmducc/ansatz.hpp"
#include "rbmducc/pauli.hpp"
#include "rbmducc/simulator.hpp"

namespace rbmducc {

struct ObjectiveSpec {
  PauliSum hamiltonian;
  OrderedAnsatz ansatz;
  Statevector reference;
  NoiseConfig noise;
};

enum class GradientMethod { adjoint, finite_difference };

[[nodiscard]] const char *to_string(GradientMethod m) noexcept;
[[nodiscard]] GradientMethod parse_gradient_method(const std::string &s);

/// Energy function of the parameters, either compiled from an ObjectiveSpec
/// or supplied directly (test hook).
class Objective {
public:
  using Function = std::function<double(std::span<const double>)>;
  using Gradient = std::function<std::vector<double>(std::span<const double>)>;

  explicit Objective(const ObjectiveSpec &spec);
  /// Noiseless user function of n parameters; `gradient` may be empty.
  Objective(Function f, std::size_t n_params, Gradient gradient = {});

  [[nodiscard]] std::size_t n_params() const noexcept { return n_params_; }
  [[nodiscard]] bool noiseless() const noexcept { return noiseless_; }

  /// One (possibly noisy) evaluation.
  [[nodiscard]] double operator()(std::span<const double> params);
  /// Exact energy; equals operator() for noiseless objectives.
  [[nodiscard]] double exact(std::span<const double> params) const;
  /// Energy and gradient. Adjoint needs a compiled spec or a supplied
  /// gradient; it falls back to central differences otherwise.
  [[nodiscard]] std::pair<double, std::vector<double>>
  value_and_gradient(std::span<const double> params, GradientMethod method,
                     double fd_step = 1e-6) const;
  [[nodiscard]] Statevector state(std::span<const double> params) const;

private:
  std::size_t n_params_ = 0;
  bool noiseless_ = true;
  Function function_;
  Gradient gradient_;
  std::optional<NoisyEstimator> estimator_;
};

/// Single energy evaluation; noisy modes draw from noise.seed.
[[nodiscard]] double evaluate(const ObjectiveSpec &spec, std::span<const double> params);

struct TrajectoryPoint {
  std::int64_t eval_index = 0;
  double energy = 0.0;
};

struct OptimizerResult {
  std::string optimizer;
  std::vector<double> best_params;
  double best_energy = 0.0;
  std::vector<double> final_params;
  /// Energy evaluated at final_params (noisy in noisy modes).
  double final_energy = 0.0;
  std::vector<TrajectoryPoint> trajectory;
  std::int64_t evaluations = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

struct CgOptions {
  /// Gradient-norm tolerance.
  double tol = 1e-6;
  /// Stop when an iteration lowers the energy by less than ftol * max(1, |E|).
  double ftol = 1e-13;
  int max_iter = 1000;
  GradientMethod gradient = GradientMethod::adjoint;
  double fd_step = 1e-6;
};

/// Throws ModeError for noisy objectives. max_iter = 0 returns the initial
/// evaluation. A failed line search returns best-so-far with converged=false.
[[nodiscard]] OptimizerResult minimize_cg(Objective &objective, std::span<const double> init,
                                          const CgOptions &options = {});
[[nodiscard]] OptimizerResult minimize_cg(const ObjectiveSpec &spec,
                                          std::span<const double> init,
                                          const CgOptions &options = {});

struct SpsaOptions {
  int max_iter = 500;
  std::uint64_t seed = 0;
  /// Perturbation scale c in c_k = c / (k+1)^gamma.
  double c = 0.1;
  double alpha = 0.602;
  double gamma = 0.101;
  /// Stability constant as a fraction of max_iter.
  double stability_fraction = 0.1;
  /// Target magnitude of the first update; sets a by calibration.
  double first_step = 0.1;
  int calibration_samples = 10;
  /// When set, used instead of calibration.
  std::optional<double> a;
};

/// Two evaluations per iteration with +-1 Bernoulli perturbations, plus
/// 2 * calibration_samples evaluations when `a` is not given and one final
/// evaluation at the last iterate.
[[nodiscard]] OptimizerResult minimize_spsa(Objective &objective,
                                            std::span<const double> init,
                                            const SpsaOptions &options = {});
[[nodiscard]] OptimizerResult minimize_spsa(const ObjectiveSpec &spec,
                                            std::span<const double> init,
                                            const SpsaOptions &options = {});

[[nodiscard]] nlohmann::json to_json(const OptimizerResult &result);
/// `eval_index,energy_hartree` with a header row.
[[nodiscard]] std::string trajectory_csv(const OptimizerResult &result);

} // namespace rbmducc

// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "rbmducc/error.hpp"

namespace rbmducc {

const char *to_string(GradientMethod m) noexcept {
  return m == GradientMethod::adjoint ? "adjoint" : "finite_difference";
}

GradientMethod parse_gradient_method(const std::string &s) {
  if (s == "adjoint")
    return GradientMethod::adjoint;
  if (s == "finite_difference" || s == "fd")
    return GradientMethod::finite_difference;
  throw ConfigError("unknown gradient method '" + s + "'");
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

Objective::Objective(const ObjectiveSpec &spec)
    : n_params_(spec.ansatz.size()), noiseless_(spec.noise.mode == NoiseMode::noiseless) {
  spec.noise.validate();
  const int n = spec.reference.n_qubits();
  if (spec.hamiltonian.n_qubits() != n)
    throw DimensionError("Hamiltonian and reference act on different registers");
  estimator_.emplace(spec.hamiltonian, CompiledAnsatz(spec.ansatz, n), spec.reference,
                     spec.noise);
}

Objective::Objective(Function f, std::size_t n_params, Gradient gradient)
    : n_params_(n_params), function_(std::move(f)), gradient_(std::move(gradient)) {
  if (!function_)
    throw ConfigError("objective function is empty");
}

double Objective::operator()(std::span<const double> params) {
  if (params.size() != n_params_)
    throw ArityError(fmt::format("objective takes {} parameters, got {}", n_params_,
                                 params.size()));
  return estimator_ ? (*estimator_)(params) : function_(params);
}

double Objective::exact(std::span<const double> params) const {
  if (params.size() != n_params_)
    throw ArityError(fmt::format("objective takes {} parameters, got {}", n_params_,
                                 params.size()));
  return estimator_ ? estimator_->exact(params) : function_(params);
}

Statevector Objective::state(std::span<const double> params) const {
  if (!estimator_)
    throw ModeError("objective has no circuit");
  return estimator_->state(params);
}

namespace {

double real_inner(std::span<const cplx> a, std::span<const cplx> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return s;
}

} // namespace

std::pair<double, std::vector<double>>
Objective::value_and_gradient(std::span<const double> params, GradientMethod method,
                              double fd_step) const {
  const double f = exact(params);
  std::vector<double> g(n_params_, 0.0);
  if (method == GradientMethod::adjoint && gradient_) {
    g = gradient_(params);
    return {f, g};
  }
  if (method == GradientMethod::adjoint && estimator_) {
    // dE/dt_k = 2 Re <H psi| U_{>k} K_k U_{<=k} ref>, swept from the last factor.
    const auto &ansatz = estimator_->ansatz();
    Statevector phi = estimator_->state(params);
    Statevector lambda(phi.n_qubits());
    estimator_->observable().apply(phi, lambda.amplitudes());
    Statevector kphi;
    for (std::size_t k = n_params_; k-- > 0;) {
      kphi = phi;
      apply_generator(kphi, ansatz[k]);
      g[k] = 2.0 * real_inner(lambda.amplitudes(), kphi.amplitudes());
      if (k > 0) {
        apply_exponential(phi, ansatz[k], -params[k]);
        apply_exponential(lambda, ansatz[k], -params[k]);
      }
    }
    return {f, g};
  }
  std::vector<double> x(params.begin(), params.end());
  for (std::size_t k = 0; k < n_params_; ++k) {
    const double x0 = x[k];
    x[k] = x0 + fd_step;
    const double fp = exact(x);
    x[k] = x0 - fd_step;
    const double fm = exact(x);
    x[k] = x0;
    g[k] = (fp - fm) / (2.0 * fd_step);
  }
  return {f, g};
}

double evaluate(const ObjectiveSpec &spec, std::span<const double> params) {
  Objective obj(spec);
  return obj(params);
}

// ---------------------------------------------------------------------------
// Bookkeeping
// ---------------------------------------------------------------------------

namespace {

class Recorder {
public:
  Recorder(Objective &objective, OptimizerResult &result) : obj_(objective), res_(result) {
    res_.best_energy = std::numeric_limits<double>::infinity();
  }

  double value(std::span<const double> x) { return record(x, obj_(x)); }

  std::pair<double, std::vector<double>> value_and_gradient(std::span<const double> x,
                                                            GradientMethod m, double h) {
    auto [f, g] = obj_.value_and_gradient(x, m, h);
    record(x, f);
    return {f, std::move(g)};
  }

private:
  double record(std::span<const double> x, double f) {
    res_.trajectory.push_back({res_.evaluations++, f});
    if (f < res_.best_energy) {
      res_.best_energy = f;
      res_.best_params.assign(x.begin(), x.end());
    }
    return f;
  }

  Objective &obj_;
  OptimizerResult &res_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a)
    m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> axpy(std::span<const double> x, double alpha, std::span<const double> d) {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] += alpha * d[i];
  return y;
}

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double dphi = 0.0;
  std::vector<double> g;
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), if finite.
std::optional<double> cubic_min(double a, double fa, double da, double b, double fb,
                                double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0)
    return std::nullopt;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0)
    return std::nullopt;
  const double t = b - (b - a) * (db + d2 - d1) / denom;
  if (!std::isfinite(t))
    return std::nullopt;
  return t;
}

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.1;
constexpr int kMaxLineEvals = 40;

// Strong-Wolfe line search. Returns the accepted point, or the best
// sufficient-decrease point found, or nullopt.
std::optional<LinePoint> line_search(Recorder &rec, std::span<const double> x, double f0,
                                     double dphi0, std::span<const double> d, double alpha1,
                                     const CgOptions &opt) {
  int evals = 0;
  std::optional<LinePoint> best;
  auto probe = [&](double alpha) {
    ++evals;
    const auto xt = axpy(x, alpha, d);
    auto [f, g] = rec.value_and_gradient(xt, opt.gradient, opt.fd_step);
    LinePoint p{alpha, f, dot(g, d), std::move(g)};
    if (p.f <= f0 + kArmijo * alpha * dphi0 && (!best || p.f < best->f))
      best = p;
    return p;
  };
  auto armijo_fails = [&](const LinePoint &p) {
    return !(p.f <= f0 + kArmijo * p.alpha * dphi0);
  };
  auto wolfe = [&](const LinePoint &p) { return std::abs(p.dphi) <= -kCurvature * dphi0; };

  auto zoom = [&](LinePoint lo, LinePoint hi) -> std::optional<LinePoint> {
    while (evals < kMaxLineEvals) {
      const double lo_a = std::min(lo.alpha, hi.alpha);
      const double hi_a = std::max(lo.alpha, hi.alpha);
      const double width = hi_a - lo_a;
      if (width <= 1e-14 * std::max(1.0, hi_a))
        break;
      double a = 0.5 * (lo.alpha + hi.alpha);
      if (auto c = cubic_min(lo.alpha, lo.f, lo.dphi, hi.alpha, hi.f, hi.dphi);
          c && *c > lo_a + 0.1 * width && *c < hi_a - 0.1 * width)
        a = *c;
      auto p = probe(a);
      if (armijo_fails(p) || p.f >= lo.f) {
        hi = std::move(p);
      } else {
        if (wolfe(p))
          return p;
        if (p.dphi * (hi.alpha - lo.alpha) >= 0.0)
          hi = lo;
        lo = std::move(p);
      }
    }
    return best;
  };

  LinePoint prev{0.0, f0, dphi0, {}};
  double alpha = alpha1;
  while (evals < kMaxLineEvals) {
    auto p = probe(alpha);
    if (!std::isfinite(p.f))
      return best;
    if (armijo_fails(p) || (prev.alpha > 0.0 && p.f >= prev.f))
      return zoom(prev, p);
    if (wolfe(p))
      return p;
    if (p.dphi >= 0.0)
      return zoom(p, prev);
    prev = std::move(p);
    alpha *= 2.0;
  }
  return best;
}

} // namespace

// ---------------------------------------------------------------------------
// Conjugate gradient
// ---------------------------------------------------------------------------

OptimizerResult minimize_cg(Objective &objective, std::span<const double> init,
                            const CgOptions &options) {
  if (!objective.noiseless())
    throw ModeError("conjugate gradient needs a noiseless objective; use SPSA");
  if (init.size() != objective.n_params())
    throw ArityError(fmt::format("objective takes {} parameters, got {}",
                                 objective.n_params(), init.size()));
  if (options.max_iter < 0 || options.tol < 0.0 || options.ftol < 0.0 || options.fd_step <= 0.0)
    throw ConfigError("invalid CG options");

  OptimizerResult res;
  res.optimizer = "cg";
  Recorder rec(objective, res);
  std::vector<double> x(init.begin(), init.end());
  auto [f, g] = rec.value_and_gradient(x, options.gradient, options.fd_step);
  std::vector<double> d(g.size());
  std::transform(g.begin(), g.end(), d.begin(), [](double v) { return -v; });
  double gnorm = std::sqrt(dot(g, g));
  double prev_slope = 0.0, prev_alpha = 0.0;
  res.converged = gnorm <= options.tol;
  res.message = res.converged ? "gradient below tolerance" : "iteration limit";

  for (int it = 0; it < options.max_iter && !res.converged; ++it) {
    double slope = dot(g, d);
    if (slope >= 0.0) {
      std::transform(g.begin(), g.end(), d.begin(), [](double v) { return -v; });
      slope = -gnorm * gnorm;
    }
    double alpha = prev_alpha > 0.0 ? prev_alpha * prev_slope / slope : 1.0;
    const double dmax = max_abs(d);
    alpha = std::min(alpha, 1.0 / dmax);
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      alpha = std::min(1.0, 1.0 / dmax);

    auto step = line_search(rec, x, f, slope, d, alpha, options);
    bool restarted = false;
    if (!step && slope != -gnorm * gnorm) {
      std::transform(g.begin(), g.end(), d.begin(), [](double v) { return -v; });
      slope = -gnorm * gnorm;
      step = line_search(rec, x, f, slope, d, std::min(1.0, 1.0 / max_abs(d)), options);
      restarted = true;
    }
    if (!step) {
      res.message = "line search failed";
      break;
    }
    x = axpy(x, step->alpha, d);
    const double decrease = f - step->f;
    f = step->f;
    const auto g_old = std::move(g);
    g = std::move(step->g);
    gnorm = std::sqrt(dot(g, g));
    prev_alpha = step->alpha;
    prev_slope = slope;
    res.iterations = it + 1;
    if (gnorm <= options.tol) {
      res.converged = true;
      res.message = "gradient below tolerance";
      break;
    }
    if (decrease < options.ftol * std::max(1.0, std::abs(f))) {
      res.converged = true;
      res.message = "energy change below tolerance";
      break;
    }
    double beta = 0.0;
    if (!restarted) {
      double num = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i)
        num += g[i] * (g[i] - g_old[i]);
      beta = std::max(0.0, num / dot(g_old, g_old));
    }
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] = -g[i] + beta * d[i];
  }
  res.final_params = x;
  res.final_energy = f;
  return res;
}

OptimizerResult minimize_cg(const ObjectiveSpec &spec, std::span<const double> init,
                            const CgOptions &options) {
  if (spec.noise.mode != NoiseMode::noiseless)
    throw ModeError("conjugate gradient needs a noiseless objective; use SPSA");
  Objective obj(spec);
  return minimize_cg(obj, init, options);
}

// ---------------------------------------------------------------------------
// SPSA
// ---------------------------------------------------------------------------

OptimizerResult minimize_spsa(Objective &objective, std::span<const double> init,
                              const SpsaOptions &options) {
  if (init.size() != objective.n_params())
    throw ArityError(fmt::format("objective takes {} parameters, got {}",
                                 objective.n_params(), init.size()));
  if (options.max_iter < 0 || options.c <= 0.0 || options.calibration_samples < 1)
    throw ConfigError("invalid SPSA options");

  OptimizerResult res;
  res.optimizer = "spsa";
  Recorder rec(objective, res);
  std::vector<double> x(init.begin(), init.end());
  const std::size_t n = x.size();
  Rng rng(options.seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> delta(n);
  auto draw = [&] {
    for (auto &v : delta)
      v = coin(rng) ? 1.0 : -1.0;
  };
  auto shifted = [&](double scale) { return axpy(x, scale, delta); };

  if (options.max_iter == 0 || n == 0) {
    res.final_energy = rec.value(x);
    res.final_params = x;
    res.message = "no iterations";
    return res;
  }

  const double big_a = options.stability_fraction * options.max_iter;
  double a = 0.0;
  if (options.a) {
    a = *options.a;
  } else {
    double mag = 0.0;
    for (int s = 0; s < options.calibration_samples; ++s) {
      draw();
      const double fp = rec.value(shifted(options.c));
      const double fm = rec.value(shifted(-options.c));
      mag += std::abs(fp - fm) / (2.0 * options.c);
    }
    mag /= options.calibration_samples;
    a = options.first_step * std::pow(big_a + 1.0, options.alpha) / (mag > 0.0 ? mag : 1.0);
  }

  for (int k = 0; k < options.max_iter; ++k) {
    const double ak = a / std::pow(k + 1.0 + big_a, options.alpha);
    const double ck = options.c / std::pow(k + 1.0, options.gamma);
    draw();
    const double fp = rec.value(shifted(ck));
    const double fm = rec.value(shifted(-ck));
    const double scale = ak * (fp - fm) / (2.0 * ck);
    for (std::size_t i = 0; i < n; ++i)
      x[i] -= scale * delta[i];
    res.iterations = k + 1;
  }
  res.final_energy = rec.value(x);
  res.final_params = x;
  res.converged = true;
  res.message = "iteration budget used";
  return res;
}

OptimizerResult minimize_spsa(const ObjectiveSpec &spec, std::span<const double> init,
                              const SpsaOptions &options) {
  Objective obj(spec);
  return minimize_spsa(obj, init, options);
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

nlohmann::json to_json(const OptimizerResult &r) {
  nlohmann::json traj = nlohmann::json::array();
  for (const auto &p : r.trajectory)
    traj.push_back({p.eval_index, p.energy});
  return {{"schema", "rbmducc.optimizer/1"},
          {"optimizer", r.optimizer},
          {"best_params", r.best_params},
          {"best_energy", r.best_energy},
          {"final_params", r.final_params},
          {"final_energy", r.final_energy},
          {"evaluations", r.evaluations},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"message", r.message},
          {"trajectory", traj}};
}

std::string trajectory_csv(const OptimizerResult &r) {
  std::string out = "eval_index,energy_hartree\n";
  for (const auto &p : r.trajectory)
    out += fmt::format("{},{}\n", p.eval_index, p.energy);
  return out;
}

} // namespace rbmducc

// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file rbm.hpp
 * @brief Binary restricted Boltzmann machine over occupation bit-strings.
 *
 * Energy E(v,h) = -h.W.v - c.h - b.v with W of shape n_hidden x n_visible.
 * Training uses contrastive divergence on minibatches drawn from a weighted
 * training set by tower sampling; generation runs seeded Gibbs chains started
 * from training vectors.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rbmducc/configuration.hpp"
#include "rbmducc/random.hpp"

namespace rbmducc {

struct RbmHyper {
  /// 0 means n_hidden = n_visible.
  int n_hidden = 0;
  double learning_rate = 0.05;
  int epochs = 2000;
  int cd_k = 1;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double init_sigma = 0.01;
};

class RbmModel {
public:
  RbmModel() = default;
  /// All parameters zero.
  RbmModel(int n_visible, int n_hidden);
  /// Weights from N(0, sigma^2), biases zero.
  static RbmModel random(int n_visible, int n_hidden, std::uint64_t seed, double sigma = 0.01);

  [[nodiscard]] int n_visible() const noexcept { return static_cast<int>(b.size()); }
  [[nodiscard]] int n_hidden() const noexcept { return static_cast<int>(c.size()); }

  /// F(v) = -b.v - sum_i softplus(c_i + (W v)_i), so p(v) ~ exp(-F(v)).
  [[nodiscard]] double free_energy(Bits v) const;
  /// p(h_i = 1 | v).
  [[nodiscard]] Eigen::VectorXd conditional_hidden(Bits v) const;
  /// p(v_j = 1 | h).
  [[nodiscard]] Eigen::VectorXd conditional_visible(const Eigen::VectorXd &h) const;
  /// E(v, h) for binary vectors.
  [[nodiscard]] double energy(Bits v, Bits h) const;
  [[nodiscard]] bool finite() const;

  Eigen::MatrixXd W;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  friend bool operator==(const RbmModel &x, const RbmModel &y) {
    return x.W == y.W && x.b == y.b && x.c == y.c;
  }
};

[[nodiscard]] Eigen::VectorXd to_visible(Bits v, int n);

/// Weighted training vectors.
class TrainingSet {
public:
  struct Entry {
    Bits bits = 0;
    double probability = 0.0;
    friend bool operator==(const Entry &, const Entry &) = default;
  };

  TrainingSet() = default;
  /// Drops the reference and non-positive entries, merges duplicates and
  /// normalizes.
  static TrainingSet from_configurations(const std::vector<Configuration> &configs,
                                         Bits reference);

  /// Adds (or accumulates onto) an entry; the reference is ignored.
  void add(Bits bits, double probability);
  /// Rescales to unit total. Throws EmptyTrainingError when nothing is left.
  void normalize();
  void set_reference(Bits reference);

  [[nodiscard]] const std::vector<Entry> &entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] bool normalized() const noexcept { return normalized_; }
  [[nodiscard]] bool contains(Bits bits) const;
  [[nodiscard]] double total() const;

  friend bool operator==(const TrainingSet &, const TrainingSet &) = default;

private:
  std::vector<Entry> entries_;
  Bits reference_ = 0;
  bool has_reference_ = false;
  bool normalized_ = false;
};

/// Called after every epoch with (epoch index, model).
using EpochCallback = std::function<void(int, const RbmModel &)>;

/// CD-k training; returns the updated model. Throws EmptyTrainingError for an
/// empty set and DivergenceError when a parameter becomes non-finite.
[[nodiscard]] RbmModel train_cd(RbmModel model, const TrainingSet &data, const RbmHyper &hyper,
                                const EpochCallback &on_epoch = {});

struct GenerationFilters {
  int n_spatial = 0;
  int n_electrons = 0;
  int ms2 = 0;
  int min_rank = 3;
  Bits reference = 0;
  /// When false every sample is kept.
  bool enabled = true;
};

struct GenerationOptions {
  int n_samples = 5000;
  int burn_in = 100;
  int n_chains = 100;
  std::uint64_t seed = 0;
};

/// Gibbs chains from tower-sampled training vectors. Returns the distinct
/// filtered visible states sorted by bit pattern, with the fraction of kept
/// samples that hit each as probability.
[[nodiscard]] std::vector<Configuration> generate(const RbmModel &model, const TrainingSet &starts,
                                                  const GenerationOptions &options,
                                                  const GenerationFilters &filters);

/// True when v passes the electron-count, Sz and rank filters.
[[nodiscard]] bool passes_filters(Bits v, const GenerationFilters &filters);

[[nodiscard]] nlohmann::json to_json(const RbmModel &model, const RbmHyper &hyper);
[[nodiscard]] RbmModel rbm_from_json(const nlohmann::json &j);

} // namespace rbmducc

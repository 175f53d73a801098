// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rbmducc/error.hpp"

namespace rbmducc {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0)
    return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::VectorXd logistic(const Eigen::VectorXd &x) {
  return x.unaryExpr([](double t) { return logistic(t); });
}

Eigen::VectorXd bernoulli(const Eigen::VectorXd &p, Rng &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out(i) = u(rng) < p(i) ? 1.0 : 0.0;
  return out;
}

Bits to_bits(const Eigen::VectorXd &v) {
  Bits out = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) > 0.5)
      out |= bit(static_cast<int>(i));
  return out;
}

// Roulette selection over a training set.
class Tower {
public:
  explicit Tower(const TrainingSet &set) {
    double acc = 0.0;
    for (const auto &e : set.entries()) {
      acc += e.probability;
      cdf_.push_back(acc);
      bits_.push_back(e.bits);
    }
  }
  Bits operator()(Rng &rng) const {
    std::uniform_real_distribution<double> u(0.0, cdf_.back());
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u(rng));
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()),
                                         cdf_.size() - 1);
    return bits_[i];
  }

private:
  std::vector<double> cdf_;
  std::vector<Bits> bits_;
};

} // namespace

Eigen::VectorXd to_visible(Bits v, int n) {
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i)
    out(i) = test_bit(v, i) ? 1.0 : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

RbmModel::RbmModel(int n_visible, int n_hidden)
    : W(Eigen::MatrixXd::Zero(n_hidden, n_visible)), b(Eigen::VectorXd::Zero(n_visible)),
      c(Eigen::VectorXd::Zero(n_hidden)) {
  if (n_visible < 1 || n_visible > 64 || n_hidden < 1)
    throw DimensionError("RBM layer sizes out of range");
}

RbmModel RbmModel::random(int n_visible, int n_hidden, std::uint64_t seed, double sigma) {
  RbmModel m(n_visible, n_hidden);
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  for (Eigen::Index i = 0; i < m.W.rows(); ++i)
    for (Eigen::Index j = 0; j < m.W.cols(); ++j)
      m.W(i, j) = g(rng);
  return m;
}

double RbmModel::free_energy(Bits v) const {
  const Eigen::VectorXd x = to_visible(v, n_visible());
  const Eigen::VectorXd act = c + W * x;
  double f = -b.dot(x);
  for (Eigen::Index i = 0; i < act.size(); ++i)
    f -= softplus(act(i));
  return f;
}

Eigen::VectorXd RbmModel::conditional_hidden(Bits v) const {
  return logistic(c + W * to_visible(v, n_visible()));
}

Eigen::VectorXd RbmModel::conditional_visible(const Eigen::VectorXd &h) const {
  return logistic(b + W.transpose() * h);
}

double RbmModel::energy(Bits v, Bits h) const {
  const Eigen::VectorXd x = to_visible(v, n_visible());
  const Eigen::VectorXd y = to_visible(h, n_hidden());
  return -y.dot(W * x) - c.dot(y) - b.dot(x);
}

bool RbmModel::finite() const { return W.allFinite() && b.allFinite() && c.allFinite(); }

// ---------------------------------------------------------------------------
// Training set
// ---------------------------------------------------------------------------

TrainingSet TrainingSet::from_configurations(const std::vector<Configuration> &configs,
                                             Bits reference) {
  TrainingSet s;
  s.set_reference(reference);
  for (const auto &cfg : configs)
    s.add(cfg.bits, cfg.probability);
  s.normalize();
  return s;
}

void TrainingSet::set_reference(Bits reference) {
  reference_ = reference;
  has_reference_ = true;
  std::erase_if(entries_, [reference](const Entry &e) { return e.bits == reference; });
}

void TrainingSet::add(Bits bits, double probability) {
  if (probability < 0.0 || !std::isfinite(probability))
    throw ConfigError("training probabilities must be finite and non-negative");
  if ((has_reference_ && bits == reference_) || probability == 0.0)
    return;
  normalized_ = false;
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), bits,
                                   [](const Entry &e, Bits k) { return e.bits < k; });
  if (it != entries_.end() && it->bits == bits)
    it->probability += probability;
  else
    entries_.insert(it, {bits, probability});
}

void TrainingSet::normalize() {
  const double t = total();
  if (entries_.empty() || !(t > 0.0))
    throw EmptyTrainingError("training set is empty");
  for (auto &e : entries_)
    e.probability /= t;
  normalized_ = true;
}

bool TrainingSet::contains(Bits bits) const {
  return std::binary_search(entries_.begin(), entries_.end(), Entry{bits, 0.0},
                            [](const Entry &a, const Entry &b) { return a.bits < b.bits; });
}

double TrainingSet::total() const {
  double t = 0.0;
  for (const auto &e : entries_)
    t += e.probability;
  return t;
}

// ---------------------------------------------------------------------------
// Contrastive divergence
// ---------------------------------------------------------------------------

RbmModel train_cd(RbmModel model, const TrainingSet &data, const RbmHyper &hyper,
                  const EpochCallback &on_epoch) {
  if (data.empty())
    throw EmptyTrainingError("cannot train on an empty set");
  if (hyper.cd_k < 1 || hyper.batch_size < 1 || hyper.epochs < 0)
    throw ConfigError("invalid RBM hyperparameters");
  const int nv = model.n_visible();
  Rng rng(hyper.seed);
  const Tower tower(data);
  const auto batches = std::max<std::size_t>(
      1, (data.size() + static_cast<std::size_t>(hyper.batch_size) - 1) /
             static_cast<std::size_t>(hyper.batch_size));
  const double step = hyper.learning_rate / hyper.batch_size;

  Eigen::MatrixXd gW(model.W.rows(), model.W.cols());
  Eigen::VectorXd gb(model.b.size()), gc(model.c.size());
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t batch = 0; batch < batches; ++batch) {
      gW.setZero();
      gb.setZero();
      gc.setZero();
      for (int s = 0; s < hyper.batch_size; ++s) {
        const Eigen::VectorXd v0 = to_visible(tower(rng), nv);
        const Eigen::VectorXd ph0 = logistic(model.c + model.W * v0);
        Eigen::VectorXd h = bernoulli(ph0, rng);
        Eigen::VectorXd vk, phk;
        for (int k = 0; k < hyper.cd_k; ++k) {
          vk = bernoulli(model.conditional_visible(h), rng);
          phk = logistic(model.c + model.W * vk);
          if (k + 1 < hyper.cd_k)
            h = bernoulli(phk, rng);
        }
        gW += ph0 * v0.transpose() - phk * vk.transpose();
        gb += v0 - vk;
        gc += ph0 - phk;
      }
      model.W += step * gW;
      model.b += step * gb;
      model.c += step * gc;
      if (!model.finite())
        throw DivergenceError("RBM parameters became non-finite in epoch " +
                              std::to_string(epoch));
    }
    if (on_epoch)
      on_epoch(epoch, model);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

bool passes_filters(Bits v, const GenerationFilters &f) {
  if (!f.enabled)
    return true;
  if (popcount(v) != f.n_electrons)
    return false;
  const int na = popcount(v & low_mask(f.n_spatial));
  const int nb = popcount(v >> f.n_spatial);
  if (na - nb != f.ms2)
    return false;
  if (popcount(f.reference) != f.n_electrons)
    return false;
  return popcount(f.reference & ~v) >= f.min_rank;
}

std::vector<Configuration> generate(const RbmModel &model, const TrainingSet &starts,
                                    const GenerationOptions &options,
                                    const GenerationFilters &filters) {
  if (options.n_chains < 1 || options.n_samples < 0 || options.burn_in < 0)
    throw ConfigError("invalid generation options");
  const int nv = model.n_visible();
  const int chains = options.n_chains;
  const int per_chain = (options.n_samples + chains - 1) / chains;

  std::vector<Bits> initial(static_cast<std::size_t>(chains), filters.reference);
  if (!starts.empty()) {
    Rng pick(derive_seed(options.seed, 0));
    const Tower tower(starts);
    for (auto &v : initial)
      v = tower(pick);
  }

  std::vector<std::vector<Bits>> kept(static_cast<std::size_t>(chains));
#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < chains; ++ch) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(ch) + 1));
    Eigen::VectorXd v = to_visible(initial[static_cast<std::size_t>(ch)], nv);
    auto &out = kept[static_cast<std::size_t>(ch)];
    for (int step = 0; step < options.burn_in + per_chain; ++step) {
      const Eigen::VectorXd h = bernoulli(logistic(model.c + model.W * v), rng);
      v = bernoulli(model.conditional_visible(h), rng);
      if (step >= options.burn_in) {
        const Bits bits = to_bits(v);
        if (passes_filters(bits, filters))
          out.push_back(bits);
      }
    }
  }

  std::map<Bits, std::size_t> counts;
  std::size_t total = 0;
  for (const auto &chain : kept)
    for (Bits v : chain) {
      ++counts[v];
      ++total;
    }
  std::vector<Configuration> result;
  result.reserve(counts.size());
  for (const auto &[bits, n] : counts)
    result.push_back({bits, static_cast<double>(n) / static_cast<double>(total)});
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

nlohmann::json to_json(const RbmModel &model, const RbmHyper &hyper) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(model.W.size()));
  for (Eigen::Index i = 0; i < model.W.rows(); ++i)
    for (Eigen::Index j = 0; j < model.W.cols(); ++j)
      w.push_back(model.W(i, j));
  return {{"schema", "rbmducc.rbm/1"},
          {"n_visible", model.n_visible()},
          {"n_hidden", model.n_hidden()},
          {"W", w},
          {"b", std::vector<double>(model.b.data(), model.b.data() + model.b.size())},
          {"c", std::vector<double>(model.c.data(), model.c.data() + model.c.size())},
          {"hyper",
           {{"n_hidden", hyper.n_hidden},
            {"learning_rate", hyper.learning_rate},
            {"epochs", hyper.epochs},
            {"cd_k", hyper.cd_k},
            {"batch_size", hyper.batch_size},
            {"seed", hyper.seed},
            {"init_sigma", hyper.init_sigma}}}};
}

RbmModel rbm_from_json(const nlohmann::json &j) {
  const int nv = j.at("n_visible").get<int>();
  const int nh = j.at("n_hidden").get<int>();
  RbmModel m(nv, nh);
  const auto w = j.at("W").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  const auto c = j.at("c").get<std::vector<double>>();
  if (w.size() != static_cast<std::size_t>(nv * nh) || b.size() != static_cast<std::size_t>(nv) ||
      c.size() != static_cast<std::size_t>(nh))
    throw ParseError("RBM checkpoint shapes are inconsistent");
  for (int i = 0; i < nh; ++i)
    for (int k = 0; k < nv; ++k)
      m.W(i, k) = w[static_cast<std::size_t>(i * nv + k)];
  m.b = Eigen::Map<const Eigen::VectorXd>(b.data(), nv);
  m.c = Eigen::Map<const Eigen::VectorXd>(c.data(), nh);
  return m;
}

} // namespace rbmducc

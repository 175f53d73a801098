// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "rbmducc/error.hpp"

namespace rbmducc::oracle {

namespace {

using Triplet = Eigen::Triplet<cplx>;

void check_modes(int n) {
  if (n < 0 || n > kMaxModes)
    throw ResourceError("oracle limited to " + std::to_string(kMaxModes) + " modes");
}

SparseMatrix from_triplets(int n, const std::vector<Triplet> &t) {
  const auto dim = static_cast<Eigen::Index>(Bits{1} << n);
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(cplx{0.0, 0.0});
  return m;
}

// Frobenius inner product <a, b> = sum conj(a_ij) b_ij.
cplx frobenius(const SparseMatrix &a, const SparseMatrix &b) {
  return a.conjugate().cwiseProduct(b).sum();
}

std::optional<double> proportionality(const SparseMatrix &c, const SparseMatrix &t,
                                      double tol) {
  const double tn = t.norm();
  if (tn == 0.0 || c.norm() <= tol * tn)
    return std::nullopt;
  const cplx lambda = frobenius(t, c) / (tn * tn);
  const SparseMatrix resid = c - t * lambda;
  if (resid.norm() > tol * tn || std::abs(lambda.imag()) > tol)
    return std::nullopt;
  return lambda.real();
}

} // namespace

bool DenseOperator::is_hermitian(double tol) const {
  const SparseMatrix d = matrix - SparseMatrix(matrix.adjoint());
  return d.norm() <= tol;
}

bool DenseOperator::is_antihermitian(double tol) const {
  const SparseMatrix d = matrix + SparseMatrix(matrix.adjoint());
  return d.norm() <= tol;
}

std::optional<std::pair<Bits, double>> ladder(Bits k, int p, bool create) {
  if (test_bit(k, p) == create)
    return std::nullopt;
  const double sign = (popcount(k & low_mask(p)) & 1) ? -1.0 : 1.0;
  return std::pair{k ^ bit(p), sign};
}

namespace {

// Applies a^+_{c0} ... a_{d1} a_{d0} to |k>.
std::optional<std::pair<Bits, double>> apply_string(Bits k, const std::vector<int> &cre,
                                                    const std::vector<int> &des) {
  double amp = 1.0;
  for (int d : des) {
    auto r = ladder(k, d, false);
    if (!r)
      return std::nullopt;
    k = r->first;
    amp *= r->second;
  }
  for (auto it = cre.rbegin(); it != cre.rend(); ++it) {
    auto r = ladder(k, *it, true);
    if (!r)
      return std::nullopt;
    k = r->first;
    amp *= r->second;
  }
  return std::pair{k, amp};
}

void check_distinct(const std::vector<int> &idx, int n, const char *what) {
  std::set<int> seen;
  for (int p : idx) {
    if (p < 0 || p >= n)
      throw InvalidGeneratorError(std::string(what) + " index out of range");
    if (!seen.insert(p).second)
      throw InvalidGeneratorError(std::string("repeated ") + what + " index");
  }
}

} // namespace

DenseOperator dense_from_fermion_string(const std::vector<int> &creations,
                                        const std::vector<int> &destructions, int n_modes) {
  check_modes(n_modes);
  check_distinct(creations, n_modes, "creation");
  check_distinct(destructions, n_modes, "destruction");
  std::vector<Triplet> t;
  for (Bits k = 0; k < (Bits{1} << n_modes); ++k)
    if (auto r = apply_string(k, creations, destructions))
      t.emplace_back(static_cast<Eigen::Index>(r->first), static_cast<Eigen::Index>(k),
                     r->second);
  return {n_modes, from_triplets(n_modes, t)};
}

DenseOperator dense_generator(const Generator &gen, int n_modes) {
  auto tau = dense_from_fermion_string(gen.creations(), gen.destructions(), n_modes);
  tau.matrix = tau.matrix - SparseMatrix(tau.matrix.adjoint());
  tau.matrix.prune(cplx{0.0, 0.0});
  return tau;
}

DenseOperator dense_from_pauli(const PauliSum &sum) {
  const int n = sum.n_qubits();
  check_modes(n);
  std::vector<Triplet> t;
  const auto terms = sum.terms();
  for (const auto &term : terms) {
    const std::string axes = term.axes(n);
    for (Bits k = 0; k < (Bits{1} << n); ++k) {
      Bits out = k;
      cplx amp = term.coefficient;
      for (int q = 0; q < n; ++q) {
        const bool one = test_bit(k, q);
        switch (axes[static_cast<std::size_t>(q)]) {
        case 'X': out ^= bit(q); break;
        case 'Y': out ^= bit(q); amp *= one ? cplx{0, -1} : cplx{0, 1}; break;
        case 'Z': if (one) amp = -amp; break;
        default: break;
        }
      }
      t.emplace_back(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(k), amp);
    }
  }
  return {n, from_triplets(n, t)};
}

std::vector<std::pair<Bits, double>> hamiltonian_column(const MolecularIntegrals &ints,
                                                        Bits k) {
  const int n = ints.n_spatial();
  std::map<Bits, double> acc;
  acc[k] += ints.core_energy();
  const auto so = [n](int p, int s) { return p + s * n; };
  for (int s = 0; s < 2; ++s)
    for (int q = 0; q < n; ++q) {
      auto a = ladder(k, so(q, s), false);
      if (!a)
        continue;
      for (int p = 0; p < n; ++p) {
        const double h = ints.h1(p, q);
        if (h == 0.0)
          continue;
        if (auto c = ladder(a->first, so(p, s), true))
          acc[c->first] += h * a->second * c->second;
      }
    }
  // 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s' t} a_{q s}
  for (int s = 0; s < 2; ++s)
    for (int q = 0; q < n; ++q) {
      auto a1 = ladder(k, so(q, s), false);
      if (!a1)
        continue;
      for (int t = 0; t < 2; ++t)
        for (int sp = 0; sp < n; ++sp) {
          auto a2 = ladder(a1->first, so(sp, t), false);
          if (!a2)
            continue;
          for (int r = 0; r < n; ++r) {
            auto c1 = ladder(a2->first, so(r, t), true);
            if (!c1)
              continue;
            for (int p = 0; p < n; ++p) {
              const double v = ints.h2(p, q, r, sp);
              if (v == 0.0)
                continue;
              if (auto c2 = ladder(c1->first, so(p, s), true))
                acc[c2->first] +=
                    0.5 * v * a1->second * a2->second * c1->second * c2->second;
            }
          }
        }
    }
  return {acc.begin(), acc.end()};
}

double matrix_element(const MolecularIntegrals &ints, Bits bra, Bits ket) {
  for (const auto &[b, v] : hamiltonian_column(ints, ket))
    if (b == bra)
      return v;
  return 0.0;
}

DenseOperator dense_hamiltonian(const MolecularIntegrals &ints) {
  const int n = 2 * ints.n_spatial();
  check_modes(n);
  std::vector<Triplet> t;
  for (Bits k = 0; k < (Bits{1} << n); ++k)
    for (const auto &[b, v] : hamiltonian_column(ints, k))
      if (v != 0.0)
        t.emplace_back(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k), v);
  return {n, from_triplets(n, t)};
}

DenseOperator commutator(const DenseOperator &a, const DenseOperator &b) {
  if (a.n_qubits != b.n_qubits)
    throw DimensionError("commutator of operators on different registers");
  DenseOperator out{a.n_qubits, SparseMatrix(a.matrix * b.matrix - b.matrix * a.matrix)};
  out.matrix.prune(cplx{0.0, 0.0});
  return out;
}

double max_abs_difference(const DenseOperator &a, const DenseOperator &b) {
  if (a.n_qubits != b.n_qubits)
    throw DimensionError("operators on different registers");
  const SparseMatrix d = a.matrix - b.matrix;
  double m = 0.0;
  for (int col = 0; col < d.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(d, col); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

std::vector<Bits> sector_basis(int n_spatial, int n_alpha, int n_beta) {
  std::vector<Bits> alpha, beta;
  for (Bits m = 0; m < (Bits{1} << n_spatial); ++m) {
    if (popcount(m) == n_alpha)
      alpha.push_back(m);
    if (popcount(m) == n_beta)
      beta.push_back(m);
  }
  std::vector<Bits> out;
  for (Bits b : beta)
    for (Bits a : alpha)
      out.push_back(a | (b << n_spatial));
  std::sort(out.begin(), out.end());
  return out;
}

FciResult fci_ground(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ) {
  const int n = 2 * ints.n_spatial();
  check_modes(n);
  const Bits ref = occ.reference();
  const int na = popcount(ref & low_mask(ints.n_spatial()));
  const int nb = popcount(ref) - na;
  const auto basis = sector_basis(ints.n_spatial(), na, nb);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const auto index = [&](Bits b) {
    return static_cast<Eigen::Index>(std::lower_bound(basis.begin(), basis.end(), b) -
                                     basis.begin());
  };

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col)
    for (const auto &[b, v] : hamiltonian_column(ints, basis[static_cast<std::size_t>(col)]))
      h(index(b), col) += v;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success)
    throw ResourceError("FCI eigensolver failed");
  Eigen::VectorXd v = es.eigenvectors().col(0);
  const double e = es.eigenvalues()(0);
  Eigen::Index anchor = 0;
  v.cwiseAbs().maxCoeff(&anchor);
  if (v(anchor) < 0)
    v = -v;

  FciResult out;
  out.energy = e;
  out.residual = (h * v - e * v).norm();
  out.sector_dim = basis.size();
  out.vector.assign(std::size_t{1} << n, cplx{0.0, 0.0});
  for (Eigen::Index i = 0; i < dim; ++i)
    out.vector[basis[static_cast<std::size_t>(i)]] = v(i);
  return out;
}

std::vector<double> koopmans_energies(const MolecularIntegrals &ints,
                                      const SpinOrbitalIndexing &occ) {
  const Bits ref = occ.reference();
  const double e0 = matrix_element(ints, ref, ref);
  std::vector<double> eps(static_cast<std::size_t>(2 * ints.n_spatial()));
  for (int p = 0; p < 2 * ints.n_spatial(); ++p) {
    const Bits k = ref ^ bit(p);
    const double ek = matrix_element(ints, k, k);
    eps[static_cast<std::size_t>(p)] = test_bit(ref, p) ? e0 - ek : ek - e0;
  }
  return eps;
}

double mp2_bruteforce(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ,
                      const std::vector<double> &eps) {
  const Bits ref = occ.reference();
  const int n = 2 * ints.n_spatial();
  std::map<Bits, double> col;
  for (const auto &[b, v] : hamiltonian_column(ints, ref))
    col[b] += v;
  double e2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          if (!test_bit(ref, i) || !test_bit(ref, j) || test_bit(ref, a) || test_bit(ref, b))
            continue;
          const Bits d = ref ^ bit(i) ^ bit(j) ^ bit(a) ^ bit(b);
          const auto it = col.find(d);
          if (it == col.end() || it->second == 0.0)
            continue;
          const auto e = [&](int p) { return eps[static_cast<std::size_t>(p)]; };
          e2 += it->second * it->second / (e(i) + e(j) - e(a) - e(b));
        }
  return e2;
}

double mp2_bruteforce(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ) {
  if (const auto &orbe = ints.orbital_energies()) {
    std::vector<double> eps(2 * orbe->size());
    for (std::size_t p = 0; p < orbe->size(); ++p)
      eps[p] = eps[p + orbe->size()] = (*orbe)[p];
    return mp2_bruteforce(ints, occ, eps);
  }
  return mp2_bruteforce(ints, occ, koopmans_energies(ints, occ));
}

std::optional<double> verify_factorization(const Generator &scatterer, const Generator &dbl,
                                           const Generator &target, int n_modes, double tol) {
  const auto c = commutator(dense_generator(scatterer, n_modes), dense_generator(dbl, n_modes));
  return proportionality(c.matrix, dense_generator(target, n_modes).matrix, tol);
}

std::optional<double> verify_nested_factorization(const Generator &s1, const Generator &s2,
                                                  const Generator &dbl,
                                                  const Generator &target, int n_modes,
                                                  double tol) {
  const auto inner = commutator(dense_generator(s1, n_modes), dense_generator(dbl, n_modes));
  const auto outer = commutator(dense_generator(s2, n_modes), inner);
  return proportionality(outer.matrix, dense_generator(target, n_modes).matrix, tol);
}

GoldenRecord compute_golden(const MolecularIntegrals &ints) {
  const auto occ = make_indexing(ints);
  GoldenRecord r;
  r.fci_energy = fci_ground(ints, occ).energy;
  r.hf_energy = matrix_element(ints, occ.reference(), occ.reference());
  r.mp2_energy = mp2_bruteforce(ints, occ);
  return r;
}

GoldenStore load_golden(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open golden store " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("golden store: ") + e.what());
  }
  GoldenStore out;
  for (const auto &[id, rec] : j.items())
    out[id] = {rec.at("fci_energy").get<double>(), rec.at("hf_energy").get<double>(),
               rec.at("mp2_energy").get<double>()};
  return out;
}

void save_golden(const GoldenStore &store, const std::string &path) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto &[id, r] : store)
    j[id] = {{"fci_energy", r.fci_energy}, {"hf_energy", r.hf_energy},
             {"mp2_energy", r.mp2_energy}};
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write golden store " + path);
  out << j.dump(2) << '\n';
}

} // namespace rbmducc::oracle

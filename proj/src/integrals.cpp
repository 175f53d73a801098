// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

#include "rbmducc/integrals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "rbmducc/error.hpp"

namespace rbmducc {

namespace {

constexpr double kDuplicateTolerance = 1e-10;

int header_int(const std::string &header, const std::string &key,
               std::optional<int> fallback) {
  const std::regex re("\\b" + key + "\\s*=\\s*([-+]?\\d+)");
  std::smatch m;
  if (std::regex_search(header, m, re))
    return std::stoi(m[1].str());
  if (fallback)
    return *fallback;
  throw ParseError("FCIDUMP header is missing " + key);
}

} // namespace

MolecularIntegrals::MolecularIntegrals(int n_spatial, int n_electrons, int ms2)
    : n_spatial_(n_spatial), n_electrons_(n_electrons), ms2_(ms2) {
  if (n_spatial <= 0)
    throw ParseError("NORB must be positive");
  if (n_electrons < 0 || n_electrons > 2 * n_spatial)
    throw ParseError("NELEC must lie in [0, 2*NORB]");
  if (std::abs(ms2) > n_electrons || (n_electrons + ms2) % 2 != 0)
    throw ParseError("MS2 is inconsistent with NELEC");
  const auto n = static_cast<std::size_t>(n_spatial);
  h1_.assign(n * n, 0.0);
  h2_.assign(n * n * n * n, 0.0);
}

void MolecularIntegrals::set_h1(int p, int q, double v) {
  h1_[static_cast<std::size_t>(p * n_spatial_ + q)] = v;
  h1_[static_cast<std::size_t>(q * n_spatial_ + p)] = v;
}

void MolecularIntegrals::set_h2(int p, int q, int r, int s, double v) {
  for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}})
    for (auto [c, d] : {std::pair{r, s}, std::pair{s, r}}) {
      h2_[index4(a, b, c, d)] = v;
      h2_[index4(c, d, a, b)] = v;
    }
}

void MolecularIntegrals::set_orbital_energies(std::vector<double> eps) {
  if (static_cast<int>(eps.size()) != n_spatial_)
    throw ConsistencyError("orbital energy count differs from NORB");
  orbital_energies_ = std::move(eps);
}

double MolecularIntegrals::symmetry_violation() const {
  double worst = 0.0;
  const int n = n_spatial_;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      worst = std::max(worst, std::abs(h1(p, q) - h1(q, p)));
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = h2(p, q, r, s);
          worst = std::max({worst, std::abs(v - h2(q, p, r, s)),
                            std::abs(v - h2(p, q, s, r)),
                            std::abs(v - h2(r, s, p, q))});
        }
    }
  return worst;
}

MolecularIntegrals parse_fcidump(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open FCIDUMP file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_fcidump_text(buf.str());
}

MolecularIntegrals parse_fcidump_text(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::string header;
  bool started = false;
  bool closed = false;
  while (std::getline(in, line)) {
    std::string upper = line;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (!started) {
      const auto pos = upper.find("&FCI");
      if (pos == std::string::npos) {
        if (std::all_of(upper.begin(), upper.end(),
                        [](unsigned char c) { return std::isspace(c); }))
          continue;
        throw ParseError("FCIDUMP must start with an &FCI namelist");
      }
      started = true;
      upper = upper.substr(pos + 4);
    }
    const auto end_pos = std::min(upper.find("&END"), upper.find('/'));
    header += ' ' + upper.substr(0, end_pos);
    if (end_pos != std::string::npos) {
      closed = true;
      break;
    }
  }
  if (!started || !closed)
    throw ParseError("FCIDUMP header is not terminated by &END or /");

  MolecularIntegrals ints(header_int(header, "NORB", std::nullopt),
                          header_int(header, "NELEC", std::nullopt),
                          header_int(header, "MS2", 0));
  const int n = ints.n_spatial();
  const auto un = static_cast<std::size_t>(n);

  // Seen markers keyed by canonical index so conflicting duplicates surface.
  std::vector<std::optional<double>> seen2(un * un * un * un);
  std::vector<std::optional<double>> seen1(un * un);
  std::vector<std::optional<double>> orbe(un);
  std::optional<double> core;

  auto check = [](std::optional<double> &slot, double v, const char *what) {
    if (slot && std::abs(*slot - v) > kDuplicateTolerance)
      throw ConsistencyError(fmt::format("conflicting duplicate {} entry: {} vs {}",
                                         what, *slot, v));
    slot = v;
  };

  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace_if(line.begin(), line.end(),
                    [](char c) { return c == 'D' || c == 'd'; }, 'E');
    std::istringstream ls(line);
    double value = 0.0;
    if (!(ls >> value))
      continue;
    int idx[4];
    for (int &k : idx)
      if (!(ls >> k))
        throw ParseError(fmt::format("integral line {} needs four indices", line_no));
    for (int k : idx)
      if (k < 0 || k > n)
        throw IndexError(fmt::format("index {} outside [1,{}] on line {}", k, n, line_no));
    const int p = idx[0] - 1, q = idx[1] - 1, r = idx[2] - 1, s = idx[3] - 1;
    if (idx[0] == 0 && idx[1] == 0 && idx[2] == 0 && idx[3] == 0) {
      check(core, value, "core energy");
      ints.set_core_energy(value);
    } else if (idx[1] == 0 && idx[2] == 0 && idx[3] == 0) {
      check(orbe[static_cast<std::size_t>(p)], value, "orbital energy");
    } else if (idx[2] == 0 && idx[3] == 0) {
      if (idx[0] == 0 || idx[1] == 0)
        throw IndexError(fmt::format("malformed one-electron indices on line {}", line_no));
      check(seen1[static_cast<std::size_t>(std::min(p, q) * n + std::max(p, q))], value,
            "one-electron");
      ints.set_h1(p, q, value);
    } else {
      if (idx[0] == 0 || idx[1] == 0 || idx[2] == 0 || idx[3] == 0)
        throw IndexError(fmt::format("malformed two-electron indices on line {}", line_no));
      int a = std::max(p, q), b = std::min(p, q), c = std::max(r, s), d = std::min(r, s);
      if (std::pair{a, b} < std::pair{c, d}) {
        std::swap(a, c);
        std::swap(b, d);
      }
      const auto key = ((static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)) * un +
                        static_cast<std::size_t>(c)) * un + static_cast<std::size_t>(d);
      check(seen2[key], value, "two-electron");
      ints.set_h2(p, q, r, s, value);
    }
  }

  const auto n_orbe = std::count_if(orbe.begin(), orbe.end(),
                                    [](const auto &o) { return o.has_value(); });
  if (n_orbe == n) {
    std::vector<double> eps(un);
    std::transform(orbe.begin(), orbe.end(), eps.begin(), [](const auto &o) { return *o; });
    ints.set_orbital_energies(std::move(eps));
  } else if (n_orbe != 0) {
    throw ParseError("orbital energies are given for only some orbitals");
  }
  return ints;
}

std::string serialize_fcidump(const MolecularIntegrals &ints) {
  const int n = ints.n_spatial();
  std::string out = fmt::format(" &FCI NORB={},NELEC={},MS2={},\n &END\n", n,
                                ints.n_electrons(), ints.ms2());
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          if (std::pair{r, s} > std::pair{p, q})
            continue;
          const double v = ints.h2(p, q, r, s);
          if (v != 0.0)
            out += fmt::format("{:.17g} {} {} {} {}\n", v, p + 1, q + 1, r + 1, s + 1);
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      if (ints.h1(p, q) != 0.0)
        out += fmt::format("{:.17g} {} {} 0 0\n", ints.h1(p, q), p + 1, q + 1);
  if (const auto &eps = ints.orbital_energies())
    for (int p = 0; p < n; ++p)
      out += fmt::format("{:.17g} {} 0 0 0\n", (*eps)[static_cast<std::size_t>(p)], p + 1);
  out += fmt::format("{:.17g} 0 0 0 0\n", ints.core_energy());
  return out;
}

void write_fcidump(const MolecularIntegrals &ints, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw ParseError("cannot write FCIDUMP file: " + path);
  out << serialize_fcidump(ints);
}

int SpinOrbitalIndexing::ms2() const noexcept {
  int m = 0;
  for (int p : occupied)
    m += spin(p) == 0 ? 1 : -1;
  return m;
}

SpinOrbitalIndexing make_indexing(int n_spatial, std::vector<int> occupied) {
  SpinOrbitalIndexing idx;
  idx.n_spatial = n_spatial;
  idx.n_spin = 2 * n_spatial;
  std::sort(occupied.begin(), occupied.end());
  if (std::adjacent_find(occupied.begin(), occupied.end()) != occupied.end())
    throw IndexError("occupied list contains a repeated spin orbital");
  for (int p : occupied)
    if (p < 0 || p >= idx.n_spin)
      throw IndexError("occupied spin orbital out of range");
  const Bits ref = mask_of(occupied);
  idx.occupied = std::move(occupied);
  for (int p = 0; p < idx.n_spin; ++p)
    if (!test_bit(ref, p))
      idx.virtuals.push_back(p);
  return idx;
}

SpinOrbitalIndexing make_indexing(const MolecularIntegrals &ints) {
  const int n = ints.n_spatial();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (const auto &eps = ints.orbital_energies())
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (*eps)[static_cast<std::size_t>(a)] < (*eps)[static_cast<std::size_t>(b)];
    });
  const int n_alpha = (ints.n_electrons() + ints.ms2()) / 2;
  const int n_beta = (ints.n_electrons() - ints.ms2()) / 2;
  std::vector<int> occupied;
  for (int k = 0; k < n_alpha; ++k)
    occupied.push_back(order[static_cast<std::size_t>(k)]);
  for (int k = 0; k < n_beta; ++k)
    occupied.push_back(order[static_cast<std::size_t>(k)] + n);
  return make_indexing(n, std::move(occupied));
}

SpinIntegrals::SpinIntegrals(const MolecularIntegrals &ints)
    : n_spin_(2 * ints.n_spatial()) {
  const int ns = ints.n_spatial();
  const auto n = static_cast<std::size_t>(n_spin_);
  h1_.assign(n * n, 0.0);
  coul_.assign(n * n * n * n, 0.0);
  asym_.assign(n * n * n * n, 0.0);
  auto spin = [ns](int p) { return p / ns; };
  auto sp = [ns](int p) { return p % ns; };
  for (int p = 0; p < n_spin_; ++p)
    for (int q = 0; q < n_spin_; ++q)
      if (spin(p) == spin(q))
        h1_[static_cast<std::size_t>(p * n_spin_ + q)] = ints.h1(sp(p), sp(q));
  auto at = [n](int p, int q, int r, int s) {
    return ((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(q)) * n +
            static_cast<std::size_t>(r)) * n + static_cast<std::size_t>(s);
  };
  for (int p = 0; p < n_spin_; ++p)
    for (int q = 0; q < n_spin_; ++q)
      for (int r = 0; r < n_spin_; ++r)
        for (int s = 0; s < n_spin_; ++s)
          if (spin(p) == spin(r) && spin(q) == spin(s))
            coul_[at(p, q, r, s)] = ints.h2(sp(p), sp(r), sp(q), sp(s));
  for (int p = 0; p < n_spin_; ++p)
    for (int q = 0; q < n_spin_; ++q)
      for (int r = 0; r < n_spin_; ++r)
        for (int s = 0; s < n_spin_; ++s)
          asym_[at(p, q, r, s)] = coul_[at(p, q, r, s)] - coul_[at(p, q, s, r)];
}

std::vector<double> fock_diagonal(const MolecularIntegrals &ints,
                                  const SpinOrbitalIndexing &occ) {
  const int ns = ints.n_spatial();
  std::vector<double> f(static_cast<std::size_t>(2 * ns));
  for (int p = 0; p < 2 * ns; ++p) {
    const int sp = p % ns;
    double v = ints.h1(sp, sp);
    for (int i : occ.occupied) {
      const int si = i % ns;
      v += ints.h2(sp, sp, si, si);
      if (p / ns == i / ns)
        v -= ints.h2(sp, si, si, sp);
    }
    f[static_cast<std::size_t>(p)] = v;
  }
  return f;
}

PerturbationModel::PerturbationModel(const MolecularIntegrals &ints,
                                     const SpinOrbitalIndexing &occ,
                                     bool force_fock_recompute)
    : occ_(occ), spin_(ints) {
  const auto &file_eps = ints.orbital_energies();
  if (file_eps && !force_fock_recompute) {
    eps_.resize(static_cast<std::size_t>(occ.n_spin));
    for (int p = 0; p < occ.n_spin; ++p)
      eps_[static_cast<std::size_t>(p)] =
          (*file_eps)[static_cast<std::size_t>(p % occ.n_spatial)];
  } else {
    eps_ = fock_diagonal(ints, occ);
  }
}

double PerturbationModel::amplitude(int i, int j, int a, int b) const {
  const auto e = [this](int p) { return eps_[static_cast<std::size_t>(p)]; };
  const double denom = e(i) + e(j) - e(a) - e(b);
  if (std::abs(denom) < kDegenerateDenominator)
    throw DegeneracyError(
        fmt::format("degenerate MP2 denominator for {} {} -> {} {}", i, j, a, b));
  return spin_.antisym(i, j, a, b) / denom;
}

double PerturbationModel::transition_measure(int c, int d, int k, int l) const {
  const auto e = [this](int p) { return eps_[static_cast<std::size_t>(p)]; };
  const double denom = e(k) + e(l) - e(c) - e(d);
  if (std::abs(denom) < kDegenerateDenominator)
    throw DegeneracyError(
        fmt::format("degenerate MP2 denominator for transition {} {} <- {} {}", c, d, k, l));
  return std::abs(spin_.antisym(c, d, k, l) / denom);
}

double PerturbationModel::energy() const {
  double e2 = 0.0;
  const auto &occ = occ_.occupied;
  const auto &vir = occ_.virtuals;
  for (std::size_t x = 0; x < occ.size(); ++x)
    for (std::size_t y = x + 1; y < occ.size(); ++y)
      for (std::size_t u = 0; u < vir.size(); ++u)
        for (std::size_t w = u + 1; w < vir.size(); ++w) {
          const double g = spin_.antisym(occ[x], occ[y], vir[u], vir[w]);
          if (g == 0.0)
            continue;
          e2 += g * amplitude(occ[x], occ[y], vir[u], vir[w]);
        }
  return e2;
}

double mp2_amplitude(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ,
                     int i, int j, int a, int b) {
  return PerturbationModel(ints, occ).amplitude(i, j, a, b);
}

double mp2_energy(const MolecularIntegrals &ints, const SpinOrbitalIndexing &occ) {
  return PerturbationModel(ints, occ).energy();
}

} // namespace rbmducc

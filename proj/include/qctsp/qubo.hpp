// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_QUBO_HPP
#define QCTSP_QUBO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qctsp/geo.hpp"

namespace qctsp {

// Position-based TSP encoding: variable x_{i,p} (index i*m + p) is 1 when
// city slot i sits at tour position p. Positions wrap mod m, so feasible
// energies are closed sub-cycle costs.
struct Qubo {
  int m = 0;          // city count of the sub-problem
  int num_vars = 0;   // m * m
  std::vector<std::vector<double>> Q;  // symmetric
  double offset = 0.0;
  double penalty = 0.0;  // A, km-scale

  int var(int city, int pos) const { return city * m + pos; }
};

struct IsingHamiltonian {
  int num_spins = 0;
  std::vector<double> h;
  std::vector<std::vector<double>> J;  // symmetric, zero diagonal
  double constant = 0.0;
};

// Default penalty weight: 2 * m * max(d). Exceeds the m * max(d) dominance
// bound with margin while keeping the spectrum numerically tame.
inline double default_penalty(const DistanceMatrix& sub, double scale = 2.0) {
  return scale * static_cast<double>(sub.size()) * sub.max_distance();
}

// energy(x) = sum_p sum_{i != j} d(i,j) x_{i,p} x_{j,(p+1) mod m}
//           + A * sum_i (sum_p x_{i,p} - 1)^2
//           + A * sum_p (sum_i x_{i,p} - 1)^2
inline Qubo encode_tsp_qubo(const DistanceMatrix& sub, double penalty) {
  const int m = static_cast<int>(sub.size());
  if (m < 2) throw std::invalid_argument("encode_tsp_qubo: need at least 2 cities");
  if (!(penalty > 0.0))
    throw std::invalid_argument("encode_tsp_qubo: penalty must be positive");

  Qubo q;
  q.m = m;
  q.num_vars = m * m;
  q.penalty = penalty;
  q.Q.assign(static_cast<std::size_t>(q.num_vars),
             std::vector<double>(static_cast<std::size_t>(q.num_vars), 0.0));

  auto add_pair = [&](int a, int b, double w) {
    // split so that sum_{a,b} Q[a][b] x_a x_b contributes w on the unordered pair
    q.Q[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += w / 2.0;
    q.Q[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] += w / 2.0;
  };

  for (int p = 0; p < m; ++p) {
    const int pn = (p + 1) % m;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        add_pair(q.var(i, p), q.var(j, pn), sub.at(i, j));
      }
  }

  // (sum x - 1)^2 = 1 - sum x + 2 * sum_{pairs} x x'  over binary x
  auto add_constraint = [&](const std::vector<int>& vars) {
    q.offset += penalty;
    for (std::size_t a = 0; a < vars.size(); ++a) {
      q.Q[static_cast<std::size_t>(vars[a])][static_cast<std::size_t>(vars[a])] -=
          penalty;
      for (std::size_t b = a + 1; b < vars.size(); ++b)
        add_pair(vars[a], vars[b], 2.0 * penalty);
    }
  };

  std::vector<int> vars(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {  // each city in exactly one position
    for (int p = 0; p < m; ++p) vars[static_cast<std::size_t>(p)] = q.var(i, p);
    add_constraint(vars);
  }
  for (int p = 0; p < m; ++p) {  // each position holds exactly one city
    for (int i = 0; i < m; ++i) vars[static_cast<std::size_t>(i)] = q.var(i, p);
    add_constraint(vars);
  }
  return q;
}

inline double qubo_energy(const Qubo& q, const std::vector<int>& bits) {
  if (static_cast<int>(bits.size()) != q.num_vars)
    throw std::invalid_argument("qubo_energy: expected " +
                                std::to_string(q.num_vars) + " bits, got " +
                                std::to_string(bits.size()));
  double e = q.offset;
  for (int a = 0; a < q.num_vars; ++a) {
    if (!bits[static_cast<std::size_t>(a)]) continue;
    const auto& row = q.Q[static_cast<std::size_t>(a)];
    for (int b = 0; b < q.num_vars; ++b)
      if (bits[static_cast<std::size_t>(b)]) e += row[static_cast<std::size_t>(b)];
  }
  return e;
}

// Substitution x = (1 - s) / 2.
inline IsingHamiltonian qubo_to_ising(const Qubo& q) {
  const int n = q.num_vars;
  IsingHamiltonian hmt;
  hmt.num_spins = n;
  hmt.h.assign(static_cast<std::size_t>(n), 0.0);
  hmt.J.assign(static_cast<std::size_t>(n),
               std::vector<double>(static_cast<std::size_t>(n), 0.0));
  hmt.constant = q.offset;
  for (int a = 0; a < n; ++a) {
    const double qaa = q.Q[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)];
    hmt.constant += qaa / 2.0;
    hmt.h[static_cast<std::size_t>(a)] -= qaa / 2.0;
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const double qab = q.Q[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (qab == 0.0) continue;
      hmt.constant += qab / 4.0;
      hmt.h[static_cast<std::size_t>(a)] -= qab / 4.0;
      hmt.h[static_cast<std::size_t>(b)] -= qab / 4.0;
      // ordered pairs (a,b) and (b,a) each contribute half of J_ab
      hmt.J[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += qab / 4.0;
      hmt.J[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] += qab / 4.0;
    }
  }
  return hmt;
}

inline double ising_energy(const IsingHamiltonian& hmt,
                           const std::vector<int>& spins) {
  if (static_cast<int>(spins.size()) != hmt.num_spins)
    throw std::invalid_argument("ising_energy: expected " +
                                std::to_string(hmt.num_spins) + " spins, got " +
                                std::to_string(spins.size()));
  for (int s : spins)
    if (s != 1 && s != -1)
      throw std::invalid_argument("ising_energy: spins must be +1 or -1");
  double e = hmt.constant;
  for (int i = 0; i < hmt.num_spins; ++i) {
    e += hmt.h[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < hmt.num_spins; ++j)
      e += hmt.J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
           spins[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(j)];
  }
  return e;
}

// Energy of every computational-basis state, indexed with qubit 0 as the
// most significant bit. Bit 0 maps to spin +1.
inline std::vector<double> ising_energy_table(const IsingHamiltonian& hmt) {
  const int n = hmt.num_spins;
  if (n > 24) throw std::invalid_argument("ising_energy_table: too many spins");
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> table(size);
  std::vector<int> spins(static_cast<std::size_t>(n));
  for (std::size_t z = 0; z < size; ++z) {
    for (int q = 0; q < n; ++q) {
      const int bit = static_cast<int>((z >> (n - 1 - q)) & 1U);
      spins[static_cast<std::size_t>(q)] = 1 - 2 * bit;
    }
    table[z] = ising_energy(hmt, spins);
  }
  return table;
}

}  // namespace qctsp

#endif  // QCTSP_QUBO_HPP

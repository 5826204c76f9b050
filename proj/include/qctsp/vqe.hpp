// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_VQE_HPP
#define QCTSP_VQE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qctsp/cobyla.hpp"
#include "qctsp/qsim.hpp"
#include "qctsp/qubo.hpp"
#include "qctsp/rng.hpp"

namespace qctsp {

struct VqeConfig {
  int max_iter = 100;        // objective-evaluation budget
  std::uint64_t shots = 1024;
  int reps = 3;
  double rho_begin = 1.0;
  double rho_end = 1e-4;

  void validate() const {
    if (max_iter < 1) throw std::invalid_argument("VqeConfig: max_iter must be >= 1");
    if (shots < 1) throw std::invalid_argument("VqeConfig: shots must be >= 1");
    if (reps < 0) throw std::invalid_argument("VqeConfig: reps must be >= 0");
    if (!(rho_begin > rho_end && rho_end > 0.0))
      throw std::invalid_argument("VqeConfig: need 0 < rho_end < rho_begin");
  }
};

struct VqeResult {
  std::vector<double> best_params;
  double best_energy = 0.0;
  Counts final_counts;
  std::string best_bitstring;  // maximal count, ties to the lexicographically smallest
  int evaluations = 0;
};

// Minimize the expectation of a diagonal Hamiltonian over the TwoLocal
// ansatz. Noise-free mode optimizes the exact statevector expectation;
// noise mode optimizes the empirical mean energy of noisy samples. Shots
// are drawn for the final measurement in both modes.
inline VqeResult run_vqe(const IsingHamiltonian& hmt, const VqeConfig& cfg,
                         const std::optional<NoiseParams>& noise, Rng& rng) {
  cfg.validate();
  if (hmt.num_spins < 1 || hmt.num_spins > 16)
    throw std::invalid_argument("run_vqe: num_spins must be in [1, 16], got " +
                                std::to_string(hmt.num_spins));
  if (noise) noise->validate();

  const AnsatzSpec ansatz = build_ansatz(hmt.num_spins, cfg.reps);
  const std::vector<double> table = ising_energy_table(hmt);
  const bool noisy = noise && noise->enabled();

  std::vector<double> theta0(static_cast<std::size_t>(ansatz.num_params()));
  for (auto& t : theta0) t = rng.next_double() * 2.0 * M_PI;

  auto objective = [&](const std::vector<double>& theta) {
    if (!noisy) {
      const StateVector sv = simulate_statevector(ansatz, theta);
      return expectation_with_table(sv, table);
    }
    double sum = 0.0;
    detail::run_noisy_shots(ansatz, theta, *noise, cfg.shots,
                            detail::kEstimatorTrajectories, rng,
                            [&](std::size_t z) { sum += table[z]; });
    return sum / static_cast<double>(cfg.shots);
  };

  const CobylaResult opt =
      cobyla_minimize(objective, theta0, cfg.rho_begin, cfg.rho_end, cfg.max_iter);

  VqeResult result;
  result.best_params = opt.x;
  result.best_energy = opt.f;
  result.evaluations = opt.evaluations;
  if (noisy) {
    result.final_counts = noisy_sample(ansatz, opt.x, *noise, cfg.shots, rng);
  } else {
    const StateVector sv = simulate_statevector(ansatz, opt.x);
    result.final_counts = sample_counts(sv, cfg.shots, rng);
  }

  std::uint64_t best_count = 0;
  for (const auto& [bits, count] : result.final_counts.histogram)
    if (count > best_count) {  // map iterates keys ascending
      best_count = count;
      result.best_bitstring = bits;
    }
  return result;
}

// Interpret a length-m^2 bitstring as an m x m matrix with rows = cities
// and columns = positions. A permutation matrix yields the city order;
// anything else is infeasible.
inline std::optional<std::vector<int>> decode_bitstring(const std::string& bits,
                                                        int m) {
  if (static_cast<int>(bits.size()) != m * m)
    throw std::invalid_argument("decode_bitstring: expected " +
                                std::to_string(m * m) + " bits, got " +
                                std::to_string(bits.size()));
  std::vector<int> city_at_position(static_cast<std::size_t>(m), -1);
  std::vector<int> row_count(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < m; ++p) {
      const char c = bits[static_cast<std::size_t>(i * m + p)];
      if (c != '0' && c != '1')
        throw std::invalid_argument("decode_bitstring: bad character");
      if (c == '1') {
        ++row_count[static_cast<std::size_t>(i)];
        if (city_at_position[static_cast<std::size_t>(p)] >= 0)
          return std::nullopt;  // column with two cities
        city_at_position[static_cast<std::size_t>(p)] = i;
      }
    }
  for (int i = 0; i < m; ++i) {
    if (row_count[static_cast<std::size_t>(i)] != 1) return std::nullopt;
    if (city_at_position[static_cast<std::size_t>(i)] < 0) return std::nullopt;
  }
  return city_at_position;
}

// Greedy marginal repair for infeasible outcomes: per-variable one-state
// frequencies are read off the counts, then (city, position) pairs are
// assigned highest-marginal-first over the unassigned rows and columns,
// ties to the lowest variable index. Always yields a valid permutation.
inline std::vector<int> repair_to_permutation(const Counts& counts, int m) {
  if (m < 1) throw std::invalid_argument("repair_to_permutation: m must be >= 1");
  const std::size_t num_vars = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  std::vector<double> marginal(num_vars, 0.0);
  for (const auto& [bits, count] : counts.histogram) {
    if (bits.size() != num_vars)
      throw std::invalid_argument("repair_to_permutation: counts key length " +
                                  std::to_string(bits.size()) + ", expected " +
                                  std::to_string(num_vars));
    for (std::size_t v = 0; v < num_vars; ++v)
      if (bits[v] == '1') marginal[v] += static_cast<double>(count);
  }

  std::vector<bool> row_used(static_cast<std::size_t>(m), false);
  std::vector<bool> col_used(static_cast<std::size_t>(m), false);
  std::vector<int> city_at_position(static_cast<std::size_t>(m), -1);
  for (int step = 0; step < m; ++step) {
    int best_i = -1, best_p = -1;
    double best_marg = -1.0;
    for (int i = 0; i < m; ++i) {
      if (row_used[static_cast<std::size_t>(i)]) continue;
      for (int p = 0; p < m; ++p) {
        if (col_used[static_cast<std::size_t>(p)]) continue;
        const double marg = marginal[static_cast<std::size_t>(i * m + p)];
        if (marg > best_marg) {  // strict: ties keep the lowest (i, p)
          best_marg = marg;
          best_i = i;
          best_p = p;
        }
      }
    }
    row_used[static_cast<std::size_t>(best_i)] = true;
    col_used[static_cast<std::size_t>(best_p)] = true;
    city_at_position[static_cast<std::size_t>(best_p)] = best_i;
  }
  return city_at_position;
}

}  // namespace qctsp

#endif  // QCTSP_VQE_HPP

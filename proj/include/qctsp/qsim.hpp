// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_QSIM_HPP
#define QCTSP_QSIM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qctsp/qubo.hpp"
#include "qctsp/rng.hpp"

namespace qctsp {

// TwoLocal-style ansatz: `reps` blocks of [ry on every qubit, cz on the
// linear chain (0,1)..(q-2,q-1)], then one final ry layer.
struct AnsatzSpec {
  struct Gate {
    enum class Kind { Ry, Cz } kind;
    int qubit = 0;        // ry target, or the lower qubit of a cz pair
    int qubit2 = -1;      // cz partner
    int param_index = -1; // ry parameter slot
  };

  int num_qubits = 0;
  int reps = 0;
  std::vector<Gate> layout;

  int num_params() const { return num_qubits * (reps + 1); }
  int ry_count() const { return num_qubits * (reps + 1); }
  int cz_count() const { return reps * std::max(0, num_qubits - 1); }
  // Dependency depth of the layout as listed: each cz chain runs
  // sequentially, each ry layer in parallel.
  int depth() const { return num_qubits >= 2 ? reps * num_qubits + 1 : reps + 1; }
};

inline AnsatzSpec build_ansatz(int num_qubits, int reps) {
  if (num_qubits < 1) throw std::invalid_argument("build_ansatz: need >= 1 qubit");
  if (reps < 0) throw std::invalid_argument("build_ansatz: reps must be >= 0");
  AnsatzSpec a;
  a.num_qubits = num_qubits;
  a.reps = reps;
  int param = 0;
  for (int r = 0; r < reps; ++r) {
    for (int q = 0; q < num_qubits; ++q)
      a.layout.push_back({AnsatzSpec::Gate::Kind::Ry, q, -1, param++});
    for (int q = 0; q + 1 < num_qubits; ++q)
      a.layout.push_back({AnsatzSpec::Gate::Kind::Cz, q, q + 1, -1});
  }
  for (int q = 0; q < num_qubits; ++q)
    a.layout.push_back({AnsatzSpec::Gate::Kind::Ry, q, -1, param++});
  return a;
}

// Dense amplitude vector. Qubit 0 is the most significant bit of the
// basis-state index and of every bitstring key.
struct StateVector {
  int num_qubits = 0;
  std::vector<std::complex<double>> amp;

  explicit StateVector(int q = 0)
      : num_qubits(q), amp(std::size_t{1} << q, {0.0, 0.0}) {
    amp[0] = 1.0;
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return s;
  }
};

inline std::string index_to_bitstring(std::size_t z, int num_qubits) {
  std::string s(static_cast<std::size_t>(num_qubits), '0');
  for (int q = 0; q < num_qubits; ++q)
    if ((z >> (num_qubits - 1 - q)) & 1U) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

inline std::size_t bitstring_to_index(const std::string& bits) {
  std::size_t z = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bitstring_to_index: bad character");
    z = (z << 1) | static_cast<std::size_t>(c == '1');
  }
  return z;
}

namespace detail {

// ry(theta) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
inline void apply_ry(StateVector& sv, int qubit, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const std::size_t mask = std::size_t{1} << (sv.num_qubits - 1 - qubit);
  const std::size_t size = sv.amp.size();
  for (std::size_t g = 0; g < size; g += 2 * mask)
    for (std::size_t i = g; i < g + mask; ++i) {
      const auto a0 = sv.amp[i];
      const auto a1 = sv.amp[i + mask];
      sv.amp[i] = c * a0 - s * a1;
      sv.amp[i + mask] = s * a0 + c * a1;
    }
}

inline void apply_cz(StateVector& sv, int qa, int qb) {
  const std::size_t ma = std::size_t{1} << (sv.num_qubits - 1 - qa);
  const std::size_t mb = std::size_t{1} << (sv.num_qubits - 1 - qb);
  const std::size_t hi = std::max(ma, mb);
  const std::size_t lo = std::min(ma, mb);
  for (std::size_t g = hi; g < sv.amp.size(); g += 2 * hi)
    for (std::size_t i = g + lo; i < g + hi; i += 2 * lo)
      for (std::size_t z = i; z < i + lo; ++z) sv.amp[z] = -sv.amp[z];
}

inline void apply_pauli_x(StateVector& sv, int qubit) {
  const std::size_t mask = std::size_t{1} << (sv.num_qubits - 1 - qubit);
  for (std::size_t g = 0; g < sv.amp.size(); g += 2 * mask)
    for (std::size_t i = g; i < g + mask; ++i)
      std::swap(sv.amp[i], sv.amp[i + mask]);
}

inline void apply_pauli_y(StateVector& sv, int qubit) {
  const std::size_t mask = std::size_t{1} << (sv.num_qubits - 1 - qubit);
  const std::complex<double> im{0.0, 1.0};
  for (std::size_t g = 0; g < sv.amp.size(); g += 2 * mask)
    for (std::size_t i = g; i < g + mask; ++i) {
      const auto a0 = sv.amp[i];
      const auto a1 = sv.amp[i + mask];
      sv.amp[i] = -im * a1;
      sv.amp[i + mask] = im * a0;
    }
}

inline void apply_pauli_z(StateVector& sv, int qubit) {
  const std::size_t mask = std::size_t{1} << (sv.num_qubits - 1 - qubit);
  for (std::size_t z = 0; z < sv.amp.size(); ++z)
    if (z & mask) sv.amp[z] = -sv.amp[z];
}

inline void apply_pauli(StateVector& sv, int qubit, int pauli) {
  switch (pauli) {
    case 1: apply_pauli_x(sv, qubit); break;
    case 2: apply_pauli_y(sv, qubit); break;
    case 3: apply_pauli_z(sv, qubit); break;
    default: break;  // 0 = identity
  }
}

}  // namespace detail

inline StateVector simulate_statevector(const AnsatzSpec& ansatz,
                                        const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != ansatz.num_params())
    throw std::invalid_argument("simulate_statevector: expected " +
                                std::to_string(ansatz.num_params()) +
                                " params, got " + std::to_string(params.size()));
  StateVector sv(ansatz.num_qubits);
  for (const auto& g : ansatz.layout) {
    if (g.kind == AnsatzSpec::Gate::Kind::Ry)
      detail::apply_ry(sv, g.qubit, params[static_cast<std::size_t>(g.param_index)]);
    else
      detail::apply_cz(sv, g.qubit, g.qubit2);
  }
  return sv;
}

struct Counts {
  std::map<std::string, std::uint64_t> histogram;
  std::uint64_t shots = 0;
};

namespace detail {

inline std::vector<double> cumulative_probs(const StateVector& sv) {
  std::vector<double> cdf(sv.amp.size());
  double acc = 0.0;
  for (std::size_t z = 0; z < sv.amp.size(); ++z) {
    acc += std::norm(sv.amp[z]);
    cdf[z] = acc;
  }
  return cdf;
}

inline std::size_t draw_index(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.next_double() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

}  // namespace detail

// Multinomial draw from |amp|^2.
inline Counts sample_counts(const StateVector& sv, std::uint64_t shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
  if (std::abs(sv.norm_sq() - 1.0) > 1e-9)
    throw std::invalid_argument("sample_counts: state is not normalized");
  const auto cdf = detail::cumulative_probs(sv);
  Counts counts;
  counts.shots = shots;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const std::size_t z = detail::draw_index(cdf, rng);
    ++counts.histogram[index_to_bitstring(z, sv.num_qubits)];
  }
  return counts;
}

// <state| H |state> for a Hamiltonian diagonal in the computational basis:
// sum_z |amp_z|^2 E(z), bit 0 <-> spin +1.
inline double expectation_with_table(const StateVector& sv,
                                     const std::vector<double>& energy_table) {
  if (energy_table.size() != sv.amp.size())
    throw std::invalid_argument("expectation_with_table: size mismatch");
  double e = 0.0;
  for (std::size_t z = 0; z < sv.amp.size(); ++z)
    e += std::norm(sv.amp[z]) * energy_table[z];
  return e;
}

inline double expectation_diagonal(const StateVector& sv,
                                   const IsingHamiltonian& hmt) {
  if (hmt.num_spins != sv.num_qubits)
    throw std::invalid_argument("expectation_diagonal: qubit/spin count mismatch");
  return expectation_with_table(sv, ising_energy_table(hmt));
}

// Stochastic Pauli channel: each gate is followed by a depolarizing event
// with probability p1 (one-qubit) or p2 (two-qubit) that applies a uniformly
// random non-identity Pauli on the touched qubit(s); each measured bit flips
// with probability readout_flip.
struct NoiseParams {
  double p1 = 0.0;
  double p2 = 0.0;
  double readout_flip = 0.0;

  bool enabled() const { return p1 > 0.0 || p2 > 0.0 || readout_flip > 0.0; }

  void validate() const {
    for (double v : {p1, p2, readout_flip})
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("NoiseParams: probabilities must be in [0, 1]");
  }

  // ibm_kyiv-style error rates; the readout rate is a modeling choice.
  static NoiseParams nisq_preset() { return {2.726e-4, 7.984e-3, 1e-2}; }
};

namespace detail {

// Trajectory batch count used by energy estimation inside the VQE loop;
// the final measurement samples one trajectory per shot instead.
inline constexpr std::uint64_t kEstimatorTrajectories = 8;

// Shots are grouped into `trajectories` batches (0 = one per shot): every
// batch re-decides the per-gate error events, and error-free batches share
// the ideal state.
template <typename Sink>
inline void run_noisy_shots(const AnsatzSpec& ansatz,
                            const std::vector<double>& params,
                            const NoiseParams& noise, std::uint64_t shots,
                            std::uint64_t trajectories, Rng& rng, Sink&& sink) {
  noise.validate();
  if (shots < 1) throw std::invalid_argument("noisy shots must be >= 1");

  // One ideal pass, with state snapshots at each rep-block boundary so an
  // error trajectory only re-simulates from its first error onward.
  std::vector<std::pair<std::size_t, StateVector>> checkpoints;
  StateVector ideal(ansatz.num_qubits);
  checkpoints.emplace_back(0, ideal);
  {
    if (static_cast<int>(params.size()) != ansatz.num_params())
      throw std::invalid_argument("run_noisy_shots: param-length mismatch");
    for (std::size_t g = 0; g < ansatz.layout.size(); ++g) {
      const auto& gate = ansatz.layout[g];
      if (gate.kind == AnsatzSpec::Gate::Kind::Ry)
        apply_ry(ideal, gate.qubit, params[static_cast<std::size_t>(gate.param_index)]);
      else
        apply_cz(ideal, gate.qubit, gate.qubit2);
      const bool block_end = g + 1 < ansatz.layout.size() &&
                             gate.kind == AnsatzSpec::Gate::Kind::Cz &&
                             ansatz.layout[g + 1].kind == AnsatzSpec::Gate::Kind::Ry;
      if (block_end) checkpoints.emplace_back(g + 1, ideal);
    }
  }
  std::vector<double> ideal_cdf;  // built lazily

  if (trajectories == 0) trajectories = shots;
  trajectories = std::min(shots, trajectories);
  const std::uint64_t base = shots / trajectories;
  const std::uint64_t extra = shots % trajectories;

  for (std::uint64_t t = 0; t < trajectories; ++t) {
    const std::uint64_t batch_shots = base + (t < extra ? 1 : 0);

    // Decide error events for this trajectory up front.
    std::vector<std::pair<std::size_t, int>> events;  // (gate index, pauli code)
    for (std::size_t g = 0; g < ansatz.layout.size(); ++g) {
      const bool two = ansatz.layout[g].kind == AnsatzSpec::Gate::Kind::Cz;
      const double p = two ? noise.p2 : noise.p1;
      if (p > 0.0 && rng.bernoulli(p)) {
        const int code = two ? 1 + static_cast<int>(rng.next_below(15))
                             : 1 + static_cast<int>(rng.next_below(3));
        events.emplace_back(g, code);
      }
    }

    const std::vector<double>* cdf = nullptr;
    std::vector<double> traj_cdf;
    if (events.empty()) {
      if (ideal_cdf.empty()) ideal_cdf = cumulative_probs(ideal);
      cdf = &ideal_cdf;
    } else {
      std::size_t pick = 0;
      for (std::size_t c = 0; c < checkpoints.size(); ++c)
        if (checkpoints[c].first <= events.front().first) pick = c;
      const std::size_t resume = checkpoints[pick].first;
      StateVector sv = checkpoints[pick].second;

      std::size_t next_event = 0;
      for (std::size_t g = resume; g < ansatz.layout.size(); ++g) {
        const auto& gate = ansatz.layout[g];
        if (gate.kind == AnsatzSpec::Gate::Kind::Ry)
          apply_ry(sv, gate.qubit, params[static_cast<std::size_t>(gate.param_index)]);
        else
          apply_cz(sv, gate.qubit, gate.qubit2);
        if (next_event < events.size() && events[next_event].first == g) {
          const int code = events[next_event].second;
          if (gate.kind == AnsatzSpec::Gate::Kind::Ry) {
            apply_pauli(sv, gate.qubit, code);
          } else {
            apply_pauli(sv, gate.qubit, code >> 2);
            apply_pauli(sv, gate.qubit2, code & 3);
          }
          ++next_event;
        }
      }
      traj_cdf = cumulative_probs(sv);
      cdf = &traj_cdf;
    }

    for (std::uint64_t s = 0; s < batch_shots; ++s) {
      std::size_t z = draw_index(*cdf, rng);
      if (noise.readout_flip > 0.0)
        for (int q = 0; q < ansatz.num_qubits; ++q)
          if (rng.bernoulli(noise.readout_flip))
            z ^= std::size_t{1} << (ansatz.num_qubits - 1 - q);
      sink(z);
    }
  }
}

}  // namespace detail

// Per-shot error events: every shot is its own trajectory.
inline Counts noisy_sample(const AnsatzSpec& ansatz,
                           const std::vector<double>& params,
                           const NoiseParams& noise, std::uint64_t shots,
                           Rng& rng) {
  noise.validate();
  if (!noise.enabled()) {
    // channel disabled: identical to ideal sampling under the same seed
    const StateVector sv = simulate_statevector(ansatz, params);
    return sample_counts(sv, shots, rng);
  }
  Counts counts;
  counts.shots = shots;
  detail::run_noisy_shots(ansatz, params, noise, shots, /*trajectories=*/0, rng,
                          [&](std::size_t z) {
                            ++counts.histogram[index_to_bitstring(z, ansatz.num_qubits)];
                          });
  return counts;
}

}  // namespace qctsp

#endif  // QCTSP_QSIM_HPP

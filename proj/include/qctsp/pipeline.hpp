// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_PIPELINE_HPP
#define QCTSP_PIPELINE_HPP

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qctsp/cluster.hpp"
#include "qctsp/forest.hpp"
#include "qctsp/geo.hpp"
#include "qctsp/qsim.hpp"
#include "qctsp/qubo.hpp"
#include "qctsp/stats.hpp"
#include "qctsp/tour.hpp"
#include "qctsp/vqe.hpp"

namespace qctsp {

struct ExperimentConfig {
  std::string cities_file;
  int n = 4;
  int runs = 30;
  std::uint64_t seed = 0;
  std::string backend = "ideal";  // ideal | nisq
  std::uint64_t shots = 1024;
  int reps = 3;
  int max_iter = 100;
  bool ml = true;
  double penalty_scale = 2.0;
  std::string start = "Calais";
  std::string out_dir = ".";
  std::string matrix_cache;  // optional cached matrix JSON
  int threads = 0;           // 0 = hardware concurrency

  void validate() const {
    if (n < 2) throw std::invalid_argument("config: n must be >= 2");
    if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (backend != "ideal" && backend != "nisq")
      throw std::invalid_argument("config: backend must be ideal or nisq");
    if (!(penalty_scale > 0.0))
      throw std::invalid_argument("config: penalty scale must be positive");
    if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
    if (shots < 1) throw std::invalid_argument("config: shots must be >= 1");
    if (reps < 0) throw std::invalid_argument("config: reps must be >= 0");
  }
};

struct ClusterVqeMeta {
  std::vector<int> cities;  // global indices, slot order of the sub-problem
  int qubits = 0;
  int ansatz_depth = 0;
  int two_qubit_gates = 0;
  double best_energy = 0.0;
  int evaluations = 0;
  bool repaired = false;
};

struct SolverTour {
  std::vector<int> order;
  double cost = 0.0;
};

struct RunRecord {
  int run_id = 0;
  std::uint64_t seed = 0;
  ClusterAssignment clusters;
  std::vector<ClusterVqeMeta> cluster_meta;
  SolverTour classical;
  SolverTour quantum;
  SolverTour hybrid;  // populated only when ml is on
  double rho_quantum = 0.0;
  double delta_quantum = 0.0;
  double rho_hybrid = 0.0;
  double delta_hybrid = 0.0;
  std::map<std::string, double> stage_seconds;  // sidecar only, not in results JSON
};

struct Experiment {
  ExperimentConfig config;
  std::vector<City> cities;        // the n-city instance
  DistanceMatrix matrix;
  int start_index = 0;
  std::vector<RunRecord> records;
};

namespace detail {

// RNG stream tags; spaced so per-cluster streams cannot collide.
inline constexpr std::uint64_t kTagKmeans = 0x01;
inline constexpr std::uint64_t kTagVqeCluster = 0x1000;    // + cluster index
inline constexpr std::uint64_t kTagTrainData = 0x20000;
inline constexpr std::uint64_t kTagTrainQuantum = 0x30000; // + training run
inline constexpr std::uint64_t kTagForest = 0x40000;
inline constexpr std::uint64_t kTagStats = 0x50000;        // + metric/solver slot

inline constexpr int kKmeansMaxIter = 100;
inline constexpr int kMlRefineRounds = 3;
inline constexpr int kTrainRandomTours = 1500;
inline constexpr int kTrainQuantumTours = 4;

inline bool verbose_enabled() {
  static const bool v = std::getenv("QCTSP_VERBOSE") != nullptr;
  return v;
}

struct PipelineOutput {
  ClusterAssignment clusters;
  std::vector<ClusterVqeMeta> meta;
  Tour tour;
};

// Cluster -> encode -> VQE -> decode/repair -> stitch. One full
// quantum-side solve of the instance; all randomness flows from the
// (base_seed, run_tag) streams.
inline PipelineOutput run_quantum_pipeline(const DistanceMatrix& dm,
                                           const std::vector<Point>& points,
                                           int start_index,
                                           const ExperimentConfig& cfg,
                                           const std::optional<NoiseParams>& noise,
                                           std::uint64_t base_seed,
                                           std::uint64_t run_tag) {
  PipelineOutput out;
  const int n = static_cast<int>(dm.size());
  const int k = choose_k(static_cast<std::size_t>(n));
  const auto raw = kmeans(points, k, kKmeansMaxIter,
                          stream_seed(base_seed, run_tag, kTagKmeans));
  out.clusters = enforce_cap(raw, points, kDefaultClusterCap);

  VqeConfig vqe_cfg;
  vqe_cfg.max_iter = cfg.max_iter;
  vqe_cfg.shots = cfg.shots;
  vqe_cfg.reps = cfg.reps;

  std::vector<std::vector<int>> paths;
  for (std::size_t c = 0; c < out.clusters.members.size(); ++c) {
    const auto& members = out.clusters.members[c];
    const int m = static_cast<int>(members.size());
    ClusterVqeMeta meta;
    meta.cities = members;
    meta.qubits = m * m;

    if (m == 1) {
      paths.push_back(members);
      out.meta.push_back(std::move(meta));
      continue;
    }

    const DistanceMatrix sub = dm.sub_matrix(members);
    const Qubo qubo = encode_tsp_qubo(sub, default_penalty(sub, cfg.penalty_scale));
    const IsingHamiltonian ising = qubo_to_ising(qubo);
    const AnsatzSpec ansatz = build_ansatz(ising.num_spins, cfg.reps);
    meta.ansatz_depth = ansatz.depth();
    meta.two_qubit_gates = ansatz.cz_count();

    Rng vqe_rng(stream_seed(base_seed, run_tag, kTagVqeCluster + c));
    const VqeResult vqe = run_vqe(ising, vqe_cfg, noise, vqe_rng);
    meta.best_energy = vqe.best_energy;
    meta.evaluations = vqe.evaluations;

    auto local_path = decode_bitstring(vqe.best_bitstring, m);
    if (!local_path) {
      local_path = repair_to_permutation(vqe.final_counts, m);
      meta.repaired = true;
    }

    std::vector<int> global_path;
    global_path.reserve(local_path->size());
    for (int local : *local_path)
      global_path.push_back(members[static_cast<std::size_t>(local)]);
    paths.push_back(std::move(global_path));
    out.meta.push_back(std::move(meta));
  }

  out.tour = stitch(paths, start_index, dm);
  return out;
}

// Training rows for the per-n forest: seeded random permutations, the
// classical heuristic tour, and a few ideal-backend pipeline tours.
inline TrainingSet build_training_set(const DistanceMatrix& dm,
                                      const std::vector<Point>& points,
                                      int start_index, const Tour& classical_tour,
                                      const ExperimentConfig& cfg) {
  TrainingSet data;
  const int n = static_cast<int>(dm.size());

  Rng rng(stream_seed(cfg.seed, kTagTrainData, static_cast<std::uint64_t>(n)));
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (i != start_index) rest.push_back(i);

  for (int r = 0; r < kTrainRandomTours; ++r) {
    auto perm = rest;
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.next_below(perm.size() - i));
      std::swap(perm[i], perm[j]);
    }
    Tour t;
    t.closed = true;
    t.order.push_back(start_index);
    t.order.insert(t.order.end(), perm.begin(), perm.end());
    data.add(extract_features(t, dm), tour_cost(t, dm));
  }

  data.add(extract_features(classical_tour, dm), tour_cost(classical_tour, dm));

  for (int q = 0; q < kTrainQuantumTours; ++q) {
    const auto pipe = run_quantum_pipeline(dm, points, start_index, cfg,
                                           std::nullopt, cfg.seed,
                                           kTagTrainQuantum + static_cast<std::uint64_t>(q));
    data.add(extract_features(pipe.tour, dm), tour_cost(pipe.tour, dm));
  }
  return data;
}

}  // namespace detail

// Full benchmark: per run it clusters, solves each sub-problem with VQE,
// stitches, and (with ml on) refines with the per-n forest predictor.
// Deterministic per (config, run id); runs execute in parallel.
inline Experiment run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  Experiment exp;
  exp.config = cfg;

  const auto all_cities = load_cities(cfg.cities_file);
  if (static_cast<std::size_t>(cfg.n) > all_cities.size())
    throw std::invalid_argument("config: n = " + std::to_string(cfg.n) +
                                " exceeds available cities (" +
                                std::to_string(all_cities.size()) + ")");
  exp.cities.assign(all_cities.begin(), all_cities.begin() + cfg.n);

  exp.start_index = -1;
  for (std::size_t i = 0; i < exp.cities.size(); ++i)
    if (exp.cities[i].name == cfg.start) exp.start_index = static_cast<int>(i);
  if (exp.start_index < 0)
    throw std::invalid_argument("config: start city '" + cfg.start +
                                "' is not among the first " +
                                std::to_string(cfg.n) + " cities");

  exp.matrix = cfg.matrix_cache.empty()
                   ? build_distance_matrix(exp.cities)
                   : load_matrix_cache(cfg.matrix_cache, exp.cities);

  std::vector<Point> points;
  points.reserve(exp.cities.size());
  for (const auto& c : exp.cities) points.emplace_back(c.lat, c.lon);

  const Tour classical_tour = mst_heuristic(exp.matrix, exp.start_index);
  const double classical_cost = tour_cost(classical_tour, exp.matrix);

  const std::optional<NoiseParams> noise =
      cfg.backend == "nisq" ? std::optional<NoiseParams>(NoiseParams::nisq_preset())
                            : std::nullopt;

  // One forest per city count, trained before the runs so that every run
  // is a function of (config, run id) alone.
  std::optional<Forest> forest;
  if (cfg.ml) {
    const TrainingSet data = detail::build_training_set(
        exp.matrix, points, exp.start_index, classical_tour, cfg);
    ForestConfig fc;
    fc.seed = stream_seed(cfg.seed, detail::kTagForest, static_cast<std::uint64_t>(cfg.n));
    Rng forest_rng(fc.seed);
    forest = train_forest(data, fc, forest_rng);
    if (detail::verbose_enabled())
      std::fprintf(stderr, "[qctsp] forest trained on %zu rows (n=%d)\n",
                   data.size(), cfg.n);
  }

  exp.records.resize(static_cast<std::size_t>(cfg.runs));
  std::atomic<int> next_run{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::string first_error_context;

  auto worker = [&]() {
    for (;;) {
      const int r = next_run.fetch_add(1);
      if (r >= cfg.runs || failed.load()) return;
      try {
        using clock = std::chrono::steady_clock;
        RunRecord rec;
        rec.run_id = r;
        rec.seed = stream_seed(cfg.seed, static_cast<std::uint64_t>(r));

        const auto t0 = clock::now();
        const auto pipe = detail::run_quantum_pipeline(
            exp.matrix, points, exp.start_index, cfg, noise, cfg.seed,
            static_cast<std::uint64_t>(r));
        const auto t1 = clock::now();

        rec.clusters = pipe.clusters;
        rec.cluster_meta = pipe.meta;
        rec.quantum.order = pipe.tour.order;
        rec.quantum.cost = tour_cost(pipe.tour, exp.matrix);
        rec.classical.order = classical_tour.order;
        rec.classical.cost = classical_cost;
        rec.rho_quantum = approximation_ratio(rec.quantum.cost, classical_cost);
        rec.delta_quantum = percent_gap(rec.rho_quantum);

        const auto t2 = clock::now();
        if (cfg.ml) {
          const Tour refined = ml_refine(
              pipe.tour,
              [&](const std::vector<double>& f) { return forest->predict(f); },
              exp.matrix, detail::kMlRefineRounds);
          rec.hybrid.order = refined.order;
          rec.hybrid.cost = tour_cost(refined, exp.matrix);
          rec.rho_hybrid = approximation_ratio(rec.hybrid.cost, classical_cost);
          rec.delta_hybrid = percent_gap(rec.rho_hybrid);
        }
        const auto t3 = clock::now();

        const auto secs = [](auto a, auto b) {
          return std::chrono::duration<double>(b - a).count();
        };
        rec.stage_seconds["quantum_pipeline"] = secs(t0, t1);
        rec.stage_seconds["refine"] = secs(t2, t3);
        rec.stage_seconds["total"] = secs(t0, t3);

        exp.records[static_cast<std::size_t>(r)] = std::move(rec);
        if (detail::verbose_enabled())
          std::fprintf(stderr, "[qctsp] run %d/%d done\n", r + 1, cfg.runs);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
          first_error_context = "run " + std::to_string(r);
        }
        failed.store(true);
        return;
      }
    }
  };

  int thread_count = cfg.threads > 0
                         ? cfg.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::max(1, std::min(thread_count, cfg.runs));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      throw std::runtime_error("experiment aborted at " + first_error_context +
                               ": " + e.what());
    }
  }
  return exp;
}

// Cost summaries per solver; the stats stream is derived from the stored
// config so recomputation reproduces the emitted numbers exactly.
inline std::map<std::string, SummaryStats> compute_stats(const Experiment& exp) {
  auto collect = [&](auto&& get) {
    std::vector<double> v;
    v.reserve(exp.records.size());
    for (const auto& r : exp.records) v.push_back(get(r));
    return v;
  };

  std::map<std::string, SummaryStats> out;
  const auto n = static_cast<std::uint64_t>(exp.config.n);
  {
    Rng rng(stream_seed(exp.config.seed, detail::kTagStats + 0, n));
    out["classical"] = summarize(collect([](const RunRecord& r) { return r.classical.cost; }), rng);
  }
  {
    Rng rng(stream_seed(exp.config.seed, detail::kTagStats + 1, n));
    out["quantum"] = summarize(collect([](const RunRecord& r) { return r.quantum.cost; }), rng);
  }
  if (exp.config.ml) {
    Rng rng(stream_seed(exp.config.seed, detail::kTagStats + 2, n));
    out["hybrid"] = summarize(collect([](const RunRecord& r) { return r.hybrid.cost; }), rng);
  }
  return out;
}

}  // namespace qctsp

#endif  // QCTSP_PIPELINE_HPP

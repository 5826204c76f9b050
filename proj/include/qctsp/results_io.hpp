// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_RESULTS_IO_HPP
#define QCTSP_RESULTS_IO_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qctsp/pipeline.hpp"

namespace qctsp {

namespace detail {

inline nlohmann::ordered_json stats_to_json(const SummaryStats& s) {
  return {{"median", s.median}, {"q1", s.q1},       {"q3", s.q3},
          {"iqr", s.iqr},       {"sd", s.sd},       {"ci_lo", s.ci_lo},
          {"ci_hi", s.ci_hi},   {"samples", s.samples}};
}

inline SummaryStats stats_from_json(const nlohmann::json& j) {
  SummaryStats s;
  s.median = j.at("median").get<double>();
  s.q1 = j.at("q1").get<double>();
  s.q3 = j.at("q3").get<double>();
  s.iqr = j.at("iqr").get<double>();
  s.sd = j.at("sd").get<double>();
  s.ci_lo = j.at("ci_lo").get<double>();
  s.ci_hi = j.at("ci_hi").get<double>();
  s.samples = j.at("samples").get<std::size_t>();
  return s;
}

// Execution details (out_dir, threads) are deliberately left out: the same
// scientific config must produce byte-identical result files.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  return {{"cities_file", cfg.cities_file},
          {"n", cfg.n},
          {"runs", cfg.runs},
          {"seed", cfg.seed},
          {"backend", cfg.backend},
          {"shots", cfg.shots},
          {"reps", cfg.reps},
          {"max_iter", cfg.max_iter},
          {"ml", cfg.ml},
          {"penalty_scale", cfg.penalty_scale},
          {"start", cfg.start},
          {"matrix_cache", cfg.matrix_cache}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.cities_file = j.at("cities_file").get<std::string>();
  cfg.n = j.at("n").get<int>();
  cfg.runs = j.at("runs").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.backend = j.at("backend").get<std::string>();
  cfg.shots = j.at("shots").get<std::uint64_t>();
  cfg.reps = j.at("reps").get<int>();
  cfg.max_iter = j.at("max_iter").get<int>();
  cfg.ml = j.at("ml").get<bool>();
  cfg.penalty_scale = j.at("penalty_scale").get<double>();
  cfg.start = j.at("start").get<std::string>();
  cfg.matrix_cache = j.at("matrix_cache").get<std::string>();
  return cfg;
}

inline nlohmann::ordered_json record_to_json(const RunRecord& r, bool ml) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["seed"] = r.seed;
  j["clusters"] = {{"k", r.clusters.k},
                   {"members", r.clusters.members},
                   {"centroids", r.clusters.centroids}};
  auto& per_cluster = j["per_cluster"] = nlohmann::ordered_json::array();
  for (const auto& m : r.cluster_meta)
    per_cluster.push_back({{"cities", m.cities},
                           {"qubits", m.qubits},
                           {"ansatz_depth", m.ansatz_depth},
                           {"two_qubit_gates", m.two_qubit_gates},
                           {"best_energy", m.best_energy},
                           {"evaluations", m.evaluations},
                           {"repaired", m.repaired}});
  j["tours"]["classical"] = {{"order", r.classical.order}, {"cost", r.classical.cost}};
  j["tours"]["quantum"] = {{"order", r.quantum.order}, {"cost", r.quantum.cost}};
  j["rho"]["quantum"] = r.rho_quantum;
  j["delta"]["quantum"] = r.delta_quantum;
  if (ml) {
    j["tours"]["hybrid"] = {{"order", r.hybrid.order}, {"cost", r.hybrid.cost}};
    j["rho"]["hybrid"] = r.rho_hybrid;
    j["delta"]["hybrid"] = r.delta_hybrid;
  }
  return j;
}

inline RunRecord record_from_json(const nlohmann::json& j, bool ml) {
  RunRecord r;
  r.run_id = j.at("run_id").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto& cl = j.at("clusters");
  r.clusters.k = cl.at("k").get<int>();
  r.clusters.members = cl.at("members").get<std::vector<std::vector<int>>>();
  r.clusters.centroids = cl.at("centroids").get<std::vector<Point>>();
  for (const auto& m : j.at("per_cluster")) {
    ClusterVqeMeta meta;
    meta.cities = m.at("cities").get<std::vector<int>>();
    meta.qubits = m.at("qubits").get<int>();
    meta.ansatz_depth = m.at("ansatz_depth").get<int>();
    meta.two_qubit_gates = m.at("two_qubit_gates").get<int>();
    meta.best_energy = m.at("best_energy").get<double>();
    meta.evaluations = m.at("evaluations").get<int>();
    meta.repaired = m.at("repaired").get<bool>();
    r.cluster_meta.push_back(std::move(meta));
  }
  const auto& tours = j.at("tours");
  r.classical.order = tours.at("classical").at("order").get<std::vector<int>>();
  r.classical.cost = tours.at("classical").at("cost").get<double>();
  r.quantum.order = tours.at("quantum").at("order").get<std::vector<int>>();
  r.quantum.cost = tours.at("quantum").at("cost").get<double>();
  r.rho_quantum = j.at("rho").at("quantum").get<double>();
  r.delta_quantum = j.at("delta").at("quantum").get<double>();
  if (ml) {
    r.hybrid.order = tours.at("hybrid").at("order").get<std::vector<int>>();
    r.hybrid.cost = tours.at("hybrid").at("cost").get<double>();
    r.rho_hybrid = j.at("rho").at("hybrid").get<double>();
    r.delta_hybrid = j.at("delta").at("hybrid").get<double>();
  }
  return r;
}

}  // namespace detail

inline std::string results_basename(const ExperimentConfig& cfg) {
  return "results_n" + std::to_string(cfg.n) + "_" + cfg.backend +
         (cfg.ml ? "_ml-on" : "_ml-off");
}

// Top level: {"config": {...}, "runs": [...], "stats": {"<n>": {...}}}
inline nlohmann::ordered_json results_to_json(
    const Experiment& exp, const std::map<std::string, SummaryStats>& stats) {
  nlohmann::ordered_json j;
  j["config"] = detail::config_to_json(exp.config);
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : exp.records)
    runs.push_back(detail::record_to_json(r, exp.config.ml));
  nlohmann::ordered_json per_solver;
  for (const auto& [solver, s] : stats) per_solver[solver] = detail::stats_to_json(s);
  j["stats"][std::to_string(exp.config.n)] = per_solver;
  return j;
}

struct LoadedResults {
  ExperimentConfig config;
  std::vector<RunRecord> records;
  std::map<std::string, SummaryStats> stats;
};

inline LoadedResults load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": bad JSON: " + e.what());
  }
  LoadedResults out;
  out.config = detail::config_from_json(j.at("config"));
  for (const auto& r : j.at("runs"))
    out.records.push_back(detail::record_from_json(r, out.config.ml));
  const auto& stats = j.at("stats").at(std::to_string(out.config.n));
  for (auto it = stats.begin(); it != stats.end(); ++it)
    out.stats[it.key()] = detail::stats_from_json(it.value());
  return out;
}

namespace detail {

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string csv_double(double v) {
  nlohmann::json j = v;  // shortest round-trip formatting
  return j.dump();
}

struct PlotRow {
  int n;
  std::string solver;
  std::string backend;
  bool ml;
  SummaryStats stats;
};

inline std::string plot_rows_to_csv(std::vector<PlotRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const PlotRow& a, const PlotRow& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.solver != b.solver) return a.solver < b.solver;
    if (a.backend != b.backend) return a.backend < b.backend;
    return a.ml < b.ml;
  });
  std::string csv = "city_count,solver,backend,ml,median,q1,q3,sd,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.n) + "," + r.solver + "," + r.backend + "," +
           (r.ml ? "on" : "off") + "," + csv_double(r.stats.median) + "," +
           csv_double(r.stats.q1) + "," + csv_double(r.stats.q3) + "," +
           csv_double(r.stats.sd) + "," + csv_double(r.stats.ci_lo) + "," +
           csv_double(r.stats.ci_hi) + "\n";
  }
  return csv;
}

// rho summaries recomputed from the stored per-run ratios.
inline std::map<std::string, SummaryStats> rho_stats(const ExperimentConfig& cfg,
                                                     const std::vector<RunRecord>& records) {
  auto summarize_rho = [&](auto&& get, std::uint64_t slot) {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(get(r));
    Rng rng(stream_seed(cfg.seed, kTagStats + slot, static_cast<std::uint64_t>(cfg.n)));
    return summarize(v, rng);
  };
  std::map<std::string, SummaryStats> out;
  out["quantum"] = summarize_rho([](const RunRecord& r) { return r.rho_quantum; }, 17);
  if (cfg.ml)
    out["hybrid"] = summarize_rho([](const RunRecord& r) { return r.rho_hybrid; }, 18);
  return out;
}

}  // namespace detail

// Writes the results-history JSON, a timing sidecar, and per-metric plot
// CSVs. Returns the paths written. Only the timing sidecar may differ
// between identical reruns.
inline std::vector<std::string> emit_results(
    const Experiment& exp, const std::map<std::string, SummaryStats>& stats,
    const std::string& out_dir) {
  if (exp.records.empty()) throw std::invalid_argument("emit_results: no records");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base = results_basename(exp.config);
  std::vector<std::string> written;

  const std::string results_path = (fs::path(out_dir) / (base + ".json")).string();
  detail::write_text_file(results_path, results_to_json(exp, stats).dump(2) + "\n");
  written.push_back(results_path);

  {
    nlohmann::ordered_json t;
    for (const auto& r : exp.records)
      t[std::to_string(r.run_id)] = r.stage_seconds;
    const std::string timings_path =
        (fs::path(out_dir) / ("timings_" + base.substr(8) + ".json")).string();
    detail::write_text_file(timings_path, t.dump(2) + "\n");
    written.push_back(timings_path);
  }

  {
    std::vector<detail::PlotRow> cost_rows, rho_rows;
    for (const auto& [solver, s] : stats)
      cost_rows.push_back({exp.config.n, solver, exp.config.backend, exp.config.ml, s});
    for (const auto& [solver, s] : detail::rho_stats(exp.config, exp.records))
      rho_rows.push_back({exp.config.n, solver, exp.config.backend, exp.config.ml, s});
    const std::string cost_path =
        (fs::path(out_dir) / ("plot_costs_" + base.substr(8) + ".csv")).string();
    const std::string rho_path =
        (fs::path(out_dir) / ("plot_rho_" + base.substr(8) + ".csv")).string();
    detail::write_text_file(cost_path, detail::plot_rows_to_csv(cost_rows));
    detail::write_text_file(rho_path, detail::plot_rows_to_csv(rho_rows));
    written.push_back(cost_path);
    written.push_back(rho_path);
  }
  return written;
}

// Aggregate every results_*.json under `in_dir` into combined costs.csv and
// rho.csv (one row per city count, solver, backend, ml flag).
inline std::vector<std::string> emit_plotdata(const std::string& in_dir,
                                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("results_", 0) == 0 &&
        entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("no results_*.json files under " + in_dir);

  std::vector<detail::PlotRow> cost_rows, rho_rows;
  for (const auto& f : files) {
    const LoadedResults loaded = load_results(f);
    for (const auto& [solver, s] : loaded.stats)
      cost_rows.push_back(
          {loaded.config.n, solver, loaded.config.backend, loaded.config.ml, s});
    for (const auto& [solver, s] : detail::rho_stats(loaded.config, loaded.records))
      rho_rows.push_back(
          {loaded.config.n, solver, loaded.config.backend, loaded.config.ml, s});
  }

  fs::create_directories(out_dir);
  const std::string cost_path = (fs::path(out_dir) / "costs.csv").string();
  const std::string rho_path = (fs::path(out_dir) / "rho.csv").string();
  detail::write_text_file(cost_path, detail::plot_rows_to_csv(cost_rows));
  detail::write_text_file(rho_path, detail::plot_rows_to_csv(rho_rows));
  return {cost_path, rho_path};
}

}  // namespace qctsp

#endif  // QCTSP_RESULTS_IO_HPP

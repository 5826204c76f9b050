// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qctsp/qctsp.hpp"

using namespace qctsp;

namespace {

const std::string kCities = std::string(QCTSP_DATA_DIR) + "/cities_europe.csv";

ExperimentConfig base_config(int n, int runs, const std::string& backend,
                             bool ml, std::uint64_t seed = 7) {
  ExperimentConfig cfg;
  cfg.cities_file = kCities;
  cfg.n = n;
  cfg.runs = runs;
  cfg.seed = seed;
  cfg.backend = backend;
  cfg.ml = ml;
  cfg.threads = 2;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("qctsp_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST(RunExperiment, FourCityHybridMatchesBruteForce) {
  const auto exp = run_experiment(base_config(4, 5, "ideal", true));
  const auto optimal = brute_force_optimal(exp.matrix, exp.start_index);
  const double opt_cost = tour_cost(optimal, exp.matrix);
  for (const auto& rec : exp.records) {
    EXPECT_NEAR(rec.hybrid.cost, opt_cost, 1e-9 * opt_cost) << "run " << rec.run_id;
    EXPECT_LE(rec.hybrid.cost, rec.quantum.cost + 1e-9);
    EXPECT_EQ(rec.hybrid.order.front(), exp.start_index);
  }
}

TEST(RunExperiment, RecordsAreInternallyConsistent) {
  const auto exp = run_experiment(base_config(6, 4, "ideal", true, 21));
  ASSERT_EQ(exp.records.size(), 4u);
  for (const auto& rec : exp.records) {
    // costs recomputable from orders + matrix
    EXPECT_NEAR(rec.quantum.cost, tour_cost({rec.quantum.order, true}, exp.matrix), 1e-9);
    EXPECT_NEAR(rec.hybrid.cost, tour_cost({rec.hybrid.order, true}, exp.matrix), 1e-9);
    EXPECT_NEAR(rec.classical.cost, tour_cost({rec.classical.order, true}, exp.matrix), 1e-9);
    // rho and delta definitions hold exactly
    EXPECT_DOUBLE_EQ(rec.rho_quantum, rec.quantum.cost / rec.classical.cost);
    EXPECT_DOUBLE_EQ(rec.delta_quantum, (rec.rho_quantum - 1.0) * 100.0);
    EXPECT_DOUBLE_EQ(rec.rho_hybrid, rec.hybrid.cost / rec.classical.cost);
    EXPECT_DOUBLE_EQ(rec.delta_hybrid, (rec.rho_hybrid - 1.0) * 100.0);
    // cluster partition covers the instance with the cap respected
    std::vector<bool> seen(static_cast<std::size_t>(exp.config.n), false);
    for (const auto& members : rec.clusters.members) {
      EXPECT_LE(members.size(), 4u);
      for (int c : members) {
        EXPECT_FALSE(seen[static_cast<std::size_t>(c)]);
        seen[static_cast<std::size_t>(c)] = true;
      }
    }
    for (bool s : seen) EXPECT_TRUE(s);
    // per-cluster metadata matches the ansatz arithmetic
    for (const auto& meta : rec.cluster_meta) {
      const int m = static_cast<int>(meta.cities.size());
      EXPECT_EQ(meta.qubits, m * m);
      if (m >= 2) {
        EXPECT_EQ(meta.two_qubit_gates, 3 * (m * m - 1));
        EXPECT_GT(meta.evaluations, 0);
      }
    }
  }
}

TEST(RunExperiment, MlRefinementHelpsAtMedian) {
  const auto exp = run_experiment(base_config(6, 8, "ideal", true, 33));
  std::vector<double> quantum, hybrid;
  for (const auto& rec : exp.records) {
    quantum.push_back(rec.quantum.cost);
    hybrid.push_back(rec.hybrid.cost);
  }
  std::sort(quantum.begin(), quantum.end());
  std::sort(hybrid.begin(), hybrid.end());
  const auto median = [](const std::vector<double>& v) {
    return (v[v.size() / 2] + v[(v.size() - 1) / 2]) / 2.0;
  };
  EXPECT_LE(median(hybrid), median(quantum) + 1e-9);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  auto cfg1 = base_config(6, 3, "nisq", true, 99);
  cfg1.threads = 1;
  auto cfg2 = cfg1;
  cfg2.threads = 2;
  const auto exp1 = run_experiment(cfg1);
  const auto exp2 = run_experiment(cfg2);
  const auto stats1 = compute_stats(exp1);
  const auto stats2 = compute_stats(exp2);
  const auto json1 = results_to_json(exp1, stats1).dump(2);
  const auto json2 = results_to_json(exp2, stats2).dump(2);
  EXPECT_EQ(json1, json2);
}

TEST(RunExperiment, MatrixCacheReproducesHaversineResults) {
  const auto cfg = base_config(5, 2, "ideal", true, 55);
  const auto exp = run_experiment(cfg);

  const auto cache_path =
      (std::filesystem::temp_directory_path() / "qctsp_cache_run.json").string();
  save_matrix_cache(exp.matrix, cache_path);

  auto cached_cfg = cfg;
  cached_cfg.matrix_cache = cache_path;
  const auto cached = run_experiment(cached_cfg);
  for (std::size_t r = 0; r < exp.records.size(); ++r) {
    EXPECT_EQ(exp.records[r].quantum.order, cached.records[r].quantum.order);
    EXPECT_DOUBLE_EQ(exp.records[r].quantum.cost, cached.records[r].quantum.cost);
  }
}

TEST(RunExperiment, ConfigValidationErrors) {
  EXPECT_THROW(run_experiment(base_config(1, 3, "ideal", true)), std::invalid_argument);
  EXPECT_THROW(run_experiment(base_config(4, 0, "ideal", true)), std::invalid_argument);
  auto bad_backend = base_config(4, 1, "quantum", true);
  EXPECT_THROW(run_experiment(bad_backend), std::invalid_argument);
  auto bad_start = base_config(4, 1, "ideal", true);
  bad_start.start = "Atlantis";
  EXPECT_THROW(run_experiment(bad_start), std::invalid_argument);
  auto too_many = base_config(4, 1, "ideal", true);
  too_many.n = 4000;
  EXPECT_THROW(run_experiment(too_many), std::invalid_argument);
}

TEST(ResultsIo, RoundTripPreservesRecords) {
  const auto exp = run_experiment(base_config(5, 2, "nisq", true, 11));
  const auto stats = compute_stats(exp);
  const auto dir = temp_dir("roundtrip");
  const auto files = emit_results(exp, stats, dir);
  ASSERT_GE(files.size(), 1u);

  const auto loaded = load_results(files[0]);
  EXPECT_EQ(loaded.config.n, exp.config.n);
  EXPECT_EQ(loaded.config.seed, exp.config.seed);
  EXPECT_EQ(loaded.config.backend, exp.config.backend);
  ASSERT_EQ(loaded.records.size(), exp.records.size());
  for (std::size_t r = 0; r < exp.records.size(); ++r) {
    EXPECT_EQ(loaded.records[r].run_id, exp.records[r].run_id);
    EXPECT_EQ(loaded.records[r].seed, exp.records[r].seed);
    EXPECT_EQ(loaded.records[r].quantum.order, exp.records[r].quantum.order);
    EXPECT_EQ(loaded.records[r].hybrid.order, exp.records[r].hybrid.order);
    EXPECT_EQ(loaded.records[r].classical.order, exp.records[r].classical.order);
    EXPECT_EQ(loaded.records[r].quantum.cost, exp.records[r].quantum.cost);
    EXPECT_EQ(loaded.records[r].hybrid.cost, exp.records[r].hybrid.cost);
    EXPECT_EQ(loaded.records[r].rho_quantum, exp.records[r].rho_quantum);
    EXPECT_EQ(loaded.records[r].rho_hybrid, exp.records[r].rho_hybrid);
    EXPECT_EQ(loaded.records[r].clusters.members, exp.records[r].clusters.members);
  }
  // stored stats reload identically
  for (const auto& [solver, s] : stats) {
    EXPECT_EQ(loaded.stats.at(solver).median, s.median);
    EXPECT_EQ(loaded.stats.at(solver).ci_lo, s.ci_lo);
    EXPECT_EQ(loaded.stats.at(solver).ci_hi, s.ci_hi);
  }
}

TEST(ResultsIo, RerunIsByteIdentical) {
  const auto cfg = base_config(5, 3, "ideal", true, 77);
  const auto dir1 = temp_dir("bytes1");
  const auto dir2 = temp_dir("bytes2");
  {
    const auto exp = run_experiment(cfg);
    emit_results(exp, compute_stats(exp), dir1);
  }
  {
    auto cfg2 = cfg;
    cfg2.threads = 1;  // execution detail; output must not change
    const auto exp = run_experiment(cfg2);
    emit_results(exp, compute_stats(exp), dir2);
  }
  const std::string name = "/" + results_basename(cfg) + ".json";
  const auto a = slurp(dir1 + name);
  const auto b = slurp(dir2 + name);
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

TEST(ResultsIo, PlotDataAggregatesAcrossInstanceSizes) {
  const auto dir = temp_dir("plotdata");
  for (int n : {4, 5}) {
    const auto exp = run_experiment(base_config(n, 2, "ideal", true, 13));
    emit_results(exp, compute_stats(exp), dir);
  }
  const auto out = temp_dir("plotdata_out");
  const auto files = emit_plotdata(dir, out);
  ASSERT_EQ(files.size(), 2u);
  const auto costs = slurp(files[0]);
  EXPECT_NE(costs.find("city_count,solver,backend,ml"), std::string::npos);
  // one row per (n, solver): classical/quantum/hybrid for n = 4 and 5
  int rows = 0;
  for (char c : costs)
    if (c == '\n') ++rows;
  EXPECT_EQ(rows, 1 + 6);
  EXPECT_NE(costs.find("4,classical"), std::string::npos);
  EXPECT_NE(costs.find("5,hybrid"), std::string::npos);
}

TEST(ResultsIo, EmitRejectsEmptyRecords) {
  Experiment exp;
  exp.config = base_config(4, 1, "ideal", true);
  EXPECT_THROW(emit_results(exp, {}, temp_dir("empty")), std::invalid_argument);
}

TEST(ResultsIo, QuantumOnlyRunsOmitHybridBlock) {
  const auto exp = run_experiment(base_config(5, 2, "ideal", false, 3));
  const auto stats = compute_stats(exp);
  EXPECT_EQ(stats.count("hybrid"), 0u);
  const auto j = results_to_json(exp, stats);
  EXPECT_FALSE(j["runs"][0]["tours"].contains("hybrid"));
  EXPECT_TRUE(j["runs"][0]["tours"].contains("quantum"));
}

// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `solve` runs a benchmark experiment, `stats`
// prints summaries for stored results, `plotdata` exports plot CSVs.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qctsp/qctsp.hpp"

namespace {

void print_stats_table(const qctsp::LoadedResults& loaded) {
  const auto& cfg = loaded.config;
  std::printf("n=%d backend=%s ml=%s runs=%zu seed=%llu\n", cfg.n,
              cfg.backend.c_str(), cfg.ml ? "on" : "off", loaded.records.size(),
              static_cast<unsigned long long>(cfg.seed));
  std::printf("  %-10s %12s %12s %12s %12s %12s %12s\n", "solver", "median",
              "q1", "q3", "sd", "ci_lo", "ci_hi");
  for (const auto& [solver, s] : loaded.stats)
    std::printf("  %-10s %12.3f %12.3f %12.3f %12.3f %12.3f %12.3f\n",
                solver.c_str(), s.median, s.q1, s.q3, s.sd, s.ci_lo, s.ci_hi);

  for (const auto& [solver, s] : qctsp::detail::rho_stats(cfg, loaded.records))
    std::printf("  rho %-6s %12.4f (iqr %.4f, sd %.4f, ci [%.4f, %.4f])\n",
                solver.c_str(), s.median, s.iqr, s.sd, s.ci_lo, s.ci_hi);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum-classical TSP benchmark"};
  app.require_subcommand(1);

  qctsp::ExperimentConfig cfg;
  auto* solve = app.add_subcommand("solve", "Run one benchmark experiment");
  solve->add_option("--cities", cfg.cities_file, "City CSV (name,lat,lon)")
      ->required();
  solve->add_option("--n", cfg.n, "Instance size (first n cities)")->required();
  solve->add_option("--runs", cfg.runs, "Independent runs");
  solve->add_option("--seed", cfg.seed, "Base RNG seed");
  solve->add_option("--backend", cfg.backend, "ideal | nisq")
      ->check(CLI::IsMember({"ideal", "nisq"}));
  solve->add_option("--shots", cfg.shots, "Measurement shots per circuit");
  solve->add_option("--reps", cfg.reps, "Ansatz repetitions");
  solve->add_option("--max-iter", cfg.max_iter, "COBYLA evaluation budget");
  std::string ml = "on";
  solve->add_option("--ml", ml, "Forest refinement on|off")
      ->check(CLI::IsMember({"on", "off"}));
  solve->add_option("--penalty-scale", cfg.penalty_scale,
                    "QUBO penalty A = scale * m * max(d)");
  solve->add_option("--start", cfg.start, "Fixed departure city");
  solve->add_option("--out", cfg.out_dir, "Output directory")->required();
  solve->add_option("--matrix-cache", cfg.matrix_cache,
                    "Cached distance matrix JSON (instead of haversine)");
  solve->add_option("--threads", cfg.threads, "Worker threads (0 = auto)");

  std::string stats_in;
  auto* stats = app.add_subcommand("stats", "Print summaries for stored results");
  stats->add_option("--in", stats_in, "Directory with results_*.json")->required();

  std::string plot_in, plot_out;
  auto* plotdata = app.add_subcommand("plotdata", "Export aggregated plot CSVs");
  plotdata->add_option("--in", plot_in, "Directory with results_*.json")->required();
  plotdata->add_option("--out", plot_out, "Output directory for CSVs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      cfg.ml = ml == "on";
      const qctsp::Experiment exp = qctsp::run_experiment(cfg);
      const auto stats_map = qctsp::compute_stats(exp);
      const auto files = qctsp::emit_results(exp, stats_map, cfg.out_dir);
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
    } else if (stats->parsed()) {
      namespace fs = std::filesystem;
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(stats_in)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("results_", 0) == 0 &&
            entry.path().extension() == ".json")
          files.push_back(entry.path().string());
      }
      std::sort(files.begin(), files.end());
      if (files.empty())
        throw std::runtime_error("no results_*.json files under " + stats_in);
      for (const auto& f : files) print_stats_table(qctsp::load_results(f));
    } else if (plotdata->parsed()) {
      for (const auto& f : qctsp::emit_plotdata(plot_in, plot_out))
        std::cout << "wrote " << f << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

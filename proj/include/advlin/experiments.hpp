// Seeded simulation drivers and their CSV output.
//
// Every experiment produces one row per (design, n, estimator, delta,
// replicate) with a fixed list of metric columns, and a summary with the mean
// and sample standard deviation of each metric per group. Replicate k of
// experiment E draws from derive_seed(master, E, {k}), so results do not
// depend on the number of worker threads.
#pragma once

#include "advlin/core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace advlin {

inline constexpr std::uint64_t kDefaultMasterSeed = 20240;

struct ExperimentConfig {
  std::optional<int> n;
  std::optional<int> p;
  std::optional<int> reps;
  std::optional<std::vector<double>> delta_grid;
  std::uint64_t seed = kDefaultMasterSeed;
  bool full_scale = false;  // large replicate counts (500 or 1000)
  int threads = 0;          // 0: hardware concurrency
};

struct ReplicateRow {
  std::string design;
  int n = 0;
  int p = 0;
  std::string estimator;
  double delta = 0.0;
  int replicate = 0;
  std::vector<double> values;  // one per ExperimentResult::metrics
};

struct ExperimentResult {
  std::string name;
  std::vector<std::string> metrics;
  std::vector<ReplicateRow> rows;  // ordered by replicate, then insertion
};

struct SummaryRow {
  std::string design;
  int n = 0;
  int p = 0;
  std::string estimator;
  double delta = 0.0;
  int count = 0;
  std::vector<double> mean;
  std::vector<double> sd;  // sample SD, 0 for a single replicate
};

struct SummaryTable {
  std::string name;
  std::vector<std::string> metrics;
  std::vector<SummaryRow> rows;  // groups in order of first appearance
};

/// fig1, fig2, coverage, table1, table2, table3, baseline_grid, rate_scan, unlabeled.
[[nodiscard]] const std::vector<std::string>& experiment_names();

/// Throws ConfigError for an unknown name or invalid overrides.
[[nodiscard]] ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg = {});

[[nodiscard]] SummaryTable summarize(const ExperimentResult& result);

/// Column index of `metric`; throws ConfigError when absent.
[[nodiscard]] std::size_t metric_index(const std::vector<std::string>& metrics, const std::string& metric);

void write_replicates_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const SummaryTable& table);

/// Writes <name>_replicates.csv and <name>_summary.csv into `dir`.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace advlin

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shelf/generate.hpp"
#include "shelf/policies.hpp"

namespace shelf {

struct BenchConfig {
  std::vector<int> object_counts{4, 6, 8, 10};
  int trials = 25;
  std::vector<PolicyKind> policies{PolicyKind::DAR, PolicyKind::DER3, PolicyKind::BluctionDAR, PolicyKind::OracleP,
                                   PolicyKind::OraclePS};
  std::string horizon_rule = "2n";  // "<k>n" or a fixed integer
  double v = 0.80;
  double psi = 1.3;
  PsiMode psi_mode = PsiMode::Divide;
  std::uint64_t seed = 0;
  double grid_spacing = 0.01;
  std::size_t oracle_budget = 20000;  // A* expansions per oracle search

  /// Fields absent from the JSON keep their defaults. Throws ShelfError.
  static BenchConfig from_json(const std::string& text);
  void validate() const;
  int horizon(int n_objects) const;
};

struct MetricsRow {
  std::string policy;
  int n_objects = 0;
  int trials = 0;
  double success_rate = 0.0;
  double median = 0.0;  // steps over successful trials; NaN when none
  double iqr_low = 0.0;
  double iqr_high = 0.0;
  double mean_cost = 0.0;
};

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Tukey hinges: the median, and the medians of the lower and upper halves,
/// each half including the overall median when the count is odd.
/// NaNs for an empty sample.
Quartiles tukey_quartiles(std::vector<double> values);

/// Benchmark trial scene: occluders plus a hidden 6 cm cube. Resamples (with a
/// derived seed) on GenerationFailed or NoHiddenPlacement.
Scene bench_scene(int n_objects, std::uint64_t seed, const PlacementGrid& grid);

struct TrialResult {
  int n_objects = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<RolloutRecord> rollouts;  // one per configured policy
};

struct BenchResult {
  std::vector<TrialResult> trials;
  std::vector<MetricsRow> rows;
  std::vector<MetricsRow> solvable_rows;  // trials Oracle-P+S can solve; empty without it
};

std::vector<MetricsRow> aggregate(const BenchConfig& cfg, const std::vector<TrialResult>& trials,
                                  bool solvable_only);
std::string metrics_csv(const std::vector<MetricsRow>& rows);

/// Runs every policy on every trial scene; writes per-(policy, count) JSONL
/// rollouts, metrics.csv and metrics_solvable.csv when `out_dir` is non-empty.
BenchResult cmd_bench(const BenchConfig& cfg, const std::string& out_dir);

struct DatasetConfig {
  int count = 10;
  std::uint64_t seed = 0;
  bool exhaustive = false;
  double grid_spacing = 0.01;
};

struct DatasetSummary {
  int written = 0;
  int failed = 0;
  double seconds = 0.0;
};

/// Writes sample_NNNNNN/{depth.pfm, dist_thin.json, dist_cube.json,
/// dist_tall.json, scene.json} and manifest.json; wall-clock figures go to
/// timing.json so every other file is reproducible byte for byte.
DatasetSummary cmd_gen_dataset(const DatasetConfig& cfg, const std::string& out_dir);

/// PREFIX.pfm, PREFIX.pgm and PREFIX.svg for a scene file.
void cmd_render(const std::string& scene_file, const std::string& prefix);

/// K trial scenes with N occluders and a hidden target as scene_NNNN.json.
void cmd_gen_scenes(int k, int n_objects, std::uint64_t seed, const std::string& out_dir);

}  // namespace shelf

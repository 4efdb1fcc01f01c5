#include "shelf/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "shelf/errors.hpp"
#include "shelf/image_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace shelf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ShelfError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw ShelfError("write failed: " + path.string());
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ShelfError("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

double median_of_sorted(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  const std::size_t m = lo + n / 2;
  return n % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

BenchConfig BenchConfig::from_json(const std::string& text) {
  BenchConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ShelfError(std::string("bad config: ") + e.what());
  }
  try {
    if (j.contains("object_counts")) c.object_counts = j["object_counts"].get<std::vector<int>>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("policies")) {
      c.policies.clear();
      for (const auto& p : j["policies"]) c.policies.push_back(policy_from_name(p.get<std::string>()));
    }
    if (j.contains("horizon")) {
      const auto& h = j["horizon"];
      c.horizon_rule = h.is_string() ? h.get<std::string>() : std::to_string(h.get<int>());
    }
    if (j.contains("v")) c.v = j["v"].get<double>();
    if (j.contains("psi")) c.psi = j["psi"].get<double>();
    if (j.contains("psi_mode")) {
      const auto m = j["psi_mode"].get<std::string>();
      if (m == "divide") c.psi_mode = PsiMode::Divide;
      else if (m == "multiply-literal") c.psi_mode = PsiMode::MultiplyLiteral;
      else throw ShelfError("bad psi_mode: " + m);
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("grid_spacing")) c.grid_spacing = j["grid_spacing"].get<double>();
    if (j.contains("oracle_budget")) c.oracle_budget = j["oracle_budget"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw ShelfError(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

void BenchConfig::validate() const {
  if (trials < 1) throw ShelfError("trials must be >= 1");
  if (!(v > 0.0 && v <= 1.0)) throw ShelfError("v must lie in (0, 1]");
  if (!(psi > 1.0)) throw ShelfError("psi must exceed 1");
  if (object_counts.empty()) throw ShelfError("no object counts");
  if (policies.empty()) throw ShelfError("no policies");
  if (!(grid_spacing > 0.0)) throw ShelfError("grid_spacing must be positive");
  if (oracle_budget < 1) throw ShelfError("oracle_budget must be >= 1");
  (void)horizon(object_counts.front());
}

int BenchConfig::horizon(int n) const {
  const auto& r = horizon_rule;
  try {
    if (!r.empty() && r.back() == 'n') return (r.size() == 1 ? 1 : std::stoi(r.substr(0, r.size() - 1))) * n;
    return std::stoi(r);
  } catch (const std::exception&) {
    throw ShelfError("bad horizon rule: " + r);
  }
}

Quartiles tukey_quartiles(std::vector<double> v) {
  if (v.empty()) return {kNaN, kNaN, kNaN};
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const std::size_t half = (n + 1) / 2;  // lower half includes the median when n is odd
  return {median_of_sorted(v, 0, half), median_of_sorted(v, 0, n), median_of_sorted(v, n - half, n)};
}

Scene bench_scene(int n_objects, std::uint64_t seed, const PlacementGrid& grid) {
  GenerationConfig g;
  g.n_objects = n_objects;
  const TargetSpec target = TargetSpec::make(AspectRatio::Cube);
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt > 1000) throw GenerationFailed("no hideable scene for seed " + std::to_string(seed));
    const std::uint64_t s = attempt == 0 ? seed : mix_seed(seed, 0x5eed, attempt);
    try {
      Scene scene = sample_scene(g, s);
      // Resample when generation had to drop objects: the trial is meant to have n.
      if (static_cast<int>(scene.objects.size()) != n_objects) continue;
      return place_target_hidden(scene, target, s, grid);
    } catch (const GenerationFailed&) {
    } catch (const NoHiddenPlacement&) {
    }
  }
}

std::vector<MetricsRow> aggregate(const BenchConfig& cfg, const std::vector<TrialResult>& trials, bool solvable_only) {
  std::vector<MetricsRow> rows;
  std::size_t ps_slot = cfg.policies.size();
  for (std::size_t k = 0; k < cfg.policies.size(); ++k)
    if (cfg.policies[k] == PolicyKind::OraclePS) ps_slot = k;
  if (solvable_only && ps_slot == cfg.policies.size()) return rows;

  for (std::size_t k = 0; k < cfg.policies.size(); ++k) {
    for (int n : cfg.object_counts) {
      MetricsRow row;
      row.policy = policy_name(cfg.policies[k]);
      row.n_objects = n;
      int successes = 0;
      std::vector<double> steps;
      double cost = 0.0;
      for (const auto& t : trials) {
        if (t.n_objects != n) continue;
        if (solvable_only && t.rollouts[ps_slot].outcome == "unsolvable") continue;
        ++row.trials;
        const auto& r = t.rollouts[k];
        if (!r.success()) continue;
        ++successes;
        steps.push_back(static_cast<double>(r.steps.size()));
        cost += r.weighted_cost;
      }
      row.success_rate = row.trials ? static_cast<double>(successes) / row.trials : kNaN;
      const Quartiles q = tukey_quartiles(steps);
      row.median = q.median;
      row.iqr_low = q.q1;
      row.iqr_high = q.q3;
      row.mean_cost = successes ? cost / successes : kNaN;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "policy,n_objects,success_rate,median,iqr_low,iqr_high,mean_cost\n";
  for (const auto& r : rows) {
    out += r.policy + "," + std::to_string(r.n_objects) + "," + fmt(r.success_rate) + "," + fmt(r.median) + "," +
           fmt(r.iqr_low) + "," + fmt(r.iqr_high) + "," + fmt(r.mean_cost) + "\n";
  }
  return out;
}

BenchResult cmd_bench(const BenchConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  BenchResult res;
  const PlacementGrid grid = PlacementGrid::for_shelf(ShelfConfig{}, cfg.grid_spacing);
  PolicyConfig pcfg;
  pcfg.cost.psi = cfg.psi;
  pcfg.cost.mode = cfg.psi_mode;
  pcfg.grid = grid;
  pcfg.oracle_budget = cfg.oracle_budget;

  for (int n : cfg.object_counts)
    for (int i = 0; i < cfg.trials; ++i) {
      TrialResult t;
      t.n_objects = n;
      t.trial = i;
      t.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i));
      res.trials.push_back(t);
    }

  const int jobs = static_cast<int>(res.trials.size());
  std::vector<std::string> errors(jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (int j = 0; j < jobs; ++j) {
    auto& t = res.trials[j];
    try {
      const Scene scene = bench_scene(t.n_objects, t.seed, grid);
      const int h = cfg.horizon(t.n_objects);
      // Policies start from the same scene, so they can share perception results.
      PolicyConfig trial_cfg = pcfg;
      trial_cfg.cache = std::make_shared<PerceptionCache>();
      for (PolicyKind p : cfg.policies) t.rollouts.push_back(rollout(p, scene, h, cfg.v, trial_cfg, t.seed));
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  for (int j = 0; j < jobs; ++j)
    if (!errors[j].empty()) throw ShelfError("trial " + std::to_string(j) + ": " + errors[j]);

  res.rows = aggregate(cfg, res.trials, false);
  res.solvable_rows = aggregate(cfg, res.trials, true);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (std::size_t k = 0; k < cfg.policies.size(); ++k) {
      for (int n : cfg.object_counts) {
        std::string text;
        for (const auto& t : res.trials)
          if (t.n_objects == n) text += rollout_to_jsonl(t.rollouts[k], t.trial, t.seed);
        write_text(fs::path(out_dir) / ("rollouts_" + std::string(policy_name(cfg.policies[k])) + "_n" +
                                        std::to_string(n) + ".jsonl"),
                   text);
      }
    }
    write_text(fs::path(out_dir) / "metrics.csv", metrics_csv(res.rows));
    if (!res.solvable_rows.empty())
      write_text(fs::path(out_dir) / "metrics_solvable.csv", metrics_csv(res.solvable_rows));
  }
  return res;
}

DatasetSummary cmd_gen_dataset(const DatasetConfig& cfg, const std::string& out_dir) {
  if (cfg.count < 0) throw ShelfError("count must be >= 0");
  fs::create_directories(out_dir);
  const PlacementGrid grid = PlacementGrid::for_shelf(ShelfConfig{}, cfg.grid_spacing);
  static constexpr AspectRatio kAspects[] = {AspectRatio::Thin, AspectRatio::Cube, AspectRatio::Tall};

  struct Sample {
    std::uint64_t seed = 0;
    int n_objects = 0;
    std::string error;
  };
  std::vector<Sample> samples(cfg.count);
  const auto t0 = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (int i = 0; i < cfg.count; ++i) {
    Sample& s = samples[i];
    s.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
    try {
      GenerationConfig g;
      g.n_objects = 4 + static_cast<int>(mix_seed(s.seed, 0x0b) % 7);
      const Scene scene = sample_scene(g, s.seed);
      s.n_objects = static_cast<int>(scene.objects.size());
      char name[32];
      std::snprintf(name, sizeof name, "sample_%06d", i);
      const fs::path dir = fs::path(out_dir) / name;
      fs::create_directories(dir);
      for (AspectRatio a : kAspects) {
        const TargetSpec target = TargetSpec::make(a);
        const auto hps = cfg.exhaustive ? hidden_placements_exhaustive(scene, target, grid, Exec::Serial)
                                        : hidden_placements(scene, target, grid, Exec::Serial);
        const auto dist = distribution_from_placements(scene, target, hps).second;
        write_text(dir / ("dist_" + std::string(aspect_name(a)) + ".json"), distribution_to_json(dist));
      }
      write_pfm((dir / "depth.pfm").string(), depth_image(render_depth(scene, Exec::Serial)));
      write_text(dir / "scene.json", scene_to_json(scene));
    } catch (const GenerationFailed& e) {
      s.error = e.what();
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  DatasetSummary sum;
  sum.seconds = seconds;
  ordered_json manifest;
  manifest["count"] = cfg.count;
  manifest["seed"] = cfg.seed;
  manifest["mode"] = cfg.exhaustive ? "exhaustive" : "hybrid";
  manifest["grid_spacing"] = cfg.grid_spacing;
  manifest["samples"] = ordered_json::array();
  manifest["failures"] = ordered_json::array();
  for (int i = 0; i < cfg.count; ++i) {
    const Sample& s = samples[i];
    char name[32];
    std::snprintf(name, sizeof name, "sample_%06d", i);
    if (s.error.empty()) {
      ++sum.written;
      manifest["samples"].push_back({{"index", i}, {"seed", s.seed}, {"dir", name}, {"n_objects", s.n_objects}});
    } else {
      ++sum.failed;
      manifest["failures"].push_back({{"index", i}, {"seed", s.seed}, {"error", s.error}});
    }
  }
  write_text(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  ordered_json timing = {{"mode", cfg.exhaustive ? "exhaustive" : "hybrid"},
                         {"scenes", sum.written},
                         {"seconds", seconds},
                         {"scenes_per_second", seconds > 0 ? sum.written / seconds : 0.0}};
  write_text(fs::path(out_dir) / "timing.json", timing.dump(2) + "\n");
  return sum;
}

void cmd_render(const std::string& scene_file, const std::string& prefix) {
  const Scene scene = scene_from_json(read_text(scene_file));
  const auto problems = scene_violations(scene);
  if (!problems.empty()) throw ShelfError("invalid scene: " + problems.front());
  const FloatImage depth = depth_image(render_depth(scene));
  write_pfm(prefix + ".pfm", depth);
  write_pgm(prefix + ".pgm", depth);
  const TargetSpec target = scene.target ? scene.target->spec : TargetSpec::make(AspectRatio::Cube);
  const PlacementGrid grid = PlacementGrid::for_shelf(scene.shelf);
  const Scene occluders = scene.without_target();
  write_text(prefix + ".svg",
             overhead_svg(scene, floor_visibility(occluders), hidden_placements(occluders, target, grid)));
}

void cmd_gen_scenes(int k, int n_objects, std::uint64_t seed, const std::string& out_dir) {
  if (k < 0) throw ShelfError("scene count must be >= 0");
  fs::create_directories(out_dir);
  const PlacementGrid grid = PlacementGrid::for_shelf(ShelfConfig{});
  for (int i = 0; i < k; ++i) {
    const Scene s = bench_scene(n_objects, mix_seed(seed, static_cast<std::uint64_t>(n_objects),
                                                    static_cast<std::uint64_t>(i)), grid);
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d.json", i);
    write_text(fs::path(out_dir) / name, scene_to_json(s));
  }
}

}  // namespace shelf

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "shelf/errors.hpp"
#include "shelf/harness.hpp"
#include "shelf/image_io.hpp"
#include "support.hpp"

using namespace shelf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("shelf_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::map<std::string, std::string> tree(const fs::path& root, const std::set<std::string>& skip = {}) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && !skip.count(e.path().filename().string()))
      out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

// Sort-based reference: position-based hinges computed with explicit halves.
Quartiles reference_quartiles(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto med = [](const std::vector<double>& s) {
    const std::size_t n = s.size();
    return n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
  };
  const std::size_t n = v.size();
  std::vector<double> lower(v.begin(), v.begin() + static_cast<long>((n + 1) / 2));
  std::vector<double> upper(v.begin() + static_cast<long>(n / 2), v.end());
  return {med(lower), med(v), med(upper)};
}

}  // namespace

TEST_CASE("tukey quartiles") {
  auto q = tukey_quartiles({3, 4, 4});
  CHECK(q.median == 4.0);
  CHECK(q.q1 == 3.5);
  CHECK(q.q3 == 4.0);
  q = tukey_quartiles({3, 4, 4, 4, 4, 5, 6, 7, 7});
  CHECK(q.median == 4.0);
  CHECK(q.q1 == 4.0);
  CHECK(q.q3 == 6.0);
  q = tukey_quartiles({1, 2, 3, 4});
  CHECK(q.q1 == 1.5);
  CHECK(q.median == 2.5);
  CHECK(q.q3 == 3.5);
  CHECK(std::isnan(tukey_quartiles({}).median));
  testing::Rng rng(61);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v(rng.integer(1, 40));
    for (auto& x : v) x = rng.integer(0, 20);
    const auto a = tukey_quartiles(v), b = reference_quartiles(v);
    CHECK(a.q1 == b.q1);
    CHECK(a.median == b.median);
    CHECK(a.q3 == b.q3);
    CHECK(a.q1 <= a.median);
    CHECK(a.median <= a.q3);
  }
}

TEST_CASE("bench config parsing") {
  const auto c = BenchConfig::from_json(R"({"trials": 3, "policies": ["dar", "oracle-ps"], "horizon": "3n"})");
  CHECK(c.trials == 3);
  CHECK(c.policies.size() == 2);
  CHECK(c.horizon(4) == 12);
  CHECK(c.object_counts == std::vector<int>{4, 6, 8, 10});
  CHECK(BenchConfig::from_json(R"({"horizon": 5})").horizon(10) == 5);
  CHECK(BenchConfig{}.horizon(8) == 16);
  CHECK_THROWS_AS(BenchConfig::from_json(R"({"trials": 0})"), ShelfError);
  CHECK_THROWS_AS(BenchConfig::from_json(R"({"v": 1.5})"), ShelfError);
  CHECK_THROWS_AS(BenchConfig::from_json(R"({"psi": 0.5})"), ShelfError);
  CHECK_THROWS_AS(BenchConfig::from_json(R"({"psi_mode": "sideways"})"), ShelfError);
  CHECK_THROWS_AS(BenchConfig::from_json("not json"), ShelfError);
}

TEST_CASE("metrics csv") {
  MetricsRow r{"dar", 4, 2, 0.5, 3, 2.5, 3.5, 3};
  MetricsRow none{"der3", 4, 2, 0.0, NAN, NAN, NAN, NAN};
  const auto csv = metrics_csv({r, none});
  CHECK(csv ==
        "policy,n_objects,success_rate,median,iqr_low,iqr_high,mean_cost\n"
        "dar,4,0.500000,3.000000,2.500000,3.500000,3.000000\n"
        "der3,4,0.000000,nan,nan,nan,nan\n");
}

TEST_CASE("aggregate counts successes only for steps and cost") {
  BenchConfig cfg;
  cfg.object_counts = {4};
  cfg.policies = {PolicyKind::DAR};
  std::vector<TrialResult> trials(3);
  const int steps[] = {2, 4, 9};
  const char* outcome[] = {"success", "success", "horizon"};
  for (int i = 0; i < 3; ++i) {
    trials[i].n_objects = 4;
    trials[i].trial = i;
    RolloutRecord r;
    r.policy = PolicyKind::DAR;
    r.outcome = outcome[i];
    r.steps.resize(steps[i]);
    r.n_push = steps[i];
    r.weighted_cost = steps[i];
    trials[i].rollouts.push_back(r);
  }
  const auto rows = aggregate(cfg, trials, false);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].success_rate == doctest::Approx(2.0 / 3));
  CHECK(rows[0].median == 3.0);
  CHECK(rows[0].mean_cost == 3.0);
}

TEST_CASE("bench output is independent of the thread count") {
  BenchConfig cfg;
  cfg.object_counts = {4};
  cfg.trials = 2;
  cfg.policies = {PolicyKind::DAR, PolicyKind::BluctionDAR, PolicyKind::OraclePS};
  cfg.seed = 17;
  const auto a = scratch("bench_a"), b = scratch("bench_b");
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto res = cmd_bench(cfg, a.string());
  omp_set_num_threads(3);
  cmd_bench(cfg, b.string());
  omp_set_num_threads(saved);
  const auto ta = tree(a), tb = tree(b);
  CHECK(ta == tb);
  CHECK(ta.count("metrics.csv"));
  CHECK(ta.count("metrics_solvable.csv"));
  CHECK(ta.count("rollouts_bluction-dar_n4.jsonl"));
  CHECK(res.rows.size() == 3);
  CHECK(res.trials.size() == 2);
}

TEST_CASE("dataset generation is reproducible and normalized") {
  DatasetConfig cfg;
  cfg.count = 3;
  cfg.seed = 5;
  cfg.grid_spacing = 0.02;
  const auto a = scratch("ds_a"), b = scratch("ds_b");
  const auto sa = cmd_gen_dataset(cfg, a.string());
  cmd_gen_dataset(cfg, b.string());
  CHECK(sa.written + sa.failed == 3);
  const auto ta = tree(a, {"timing.json"});
  CHECK(ta == tree(b, {"timing.json"}));
  CHECK(ta.count("manifest.json"));
  CHECK(fs::exists(a / "timing.json"));
  for (const auto& [name, text] : ta) {
    if (name.find("dist_") == std::string::npos) continue;
    const auto d = distribution_from_json(text);
    double sum = 0.0;
    for (double v : d.values) sum += v;
    CHECK((sum == 0.0 || std::abs(sum - 1.0) <= 1e-9));
    CHECK(d.values.size() == 256);
  }
  const auto img = read_pfm((a / "sample_000000" / "depth.pfm").string());
  CHECK(img.width == 256);
  CHECK(img.height == 192);
}

TEST_CASE("render command") {
  const auto dir = scratch("render");
  const Scene empty = testing::empty_scene();
  {
    std::ofstream(dir / "empty.json") << scene_to_json(empty);
  }
  cmd_render((dir / "empty.json").string(), (dir / "empty").string());
  const auto pgm = slurp(dir / "empty.pgm");
  CHECK(pgm.rfind("P5\n256 192\n255\n", 0) == 0);
  const auto svg = slurp(dir / "empty.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<rect") == std::string::npos);  // no hidden cells on an empty shelf

  const auto grid = PlacementGrid::for_shelf(ShelfConfig{});
  const Scene s = bench_scene(6, 99, grid);
  {
    std::ofstream(dir / "a.json") << scene_to_json(s);
    std::ofstream(dir / "b.json") << scene_to_json(scene_from_json(scene_to_json(s)));
  }
  cmd_render((dir / "a.json").string(), (dir / "a").string());
  cmd_render((dir / "b.json").string(), (dir / "b").string());
  for (const char* ext : {".pfm", ".pgm", ".svg"})
    CHECK(slurp(dir / (std::string("a") + ext)) == slurp(dir / (std::string("b") + ext)));
  CHECK_THROWS(cmd_render((dir / "missing.json").string(), (dir / "x").string()));
}

TEST_CASE("gen-scenes writes hidden-target scenes") {
  const auto dir = scratch("scenes");
  cmd_gen_scenes(3, 5, 11, dir.string());
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d.json", i);
    const Scene s = scene_from_json(slurp(dir / name));
    CHECK(s.objects.size() == 5);
    REQUIRE(s.target);
    CHECK(target_visibility_fraction(s) == 0.0);
  }
}

TEST_CASE("pfm round trip and pgm normalization") {
  const auto dir = scratch("img");
  FloatImage img{3, 2, {0.f, 1.f, 2.f, 3.f, INFINITY, 5.5f}};
  write_pfm((dir / "x.pfm").string(), img);
  const auto back = read_pfm((dir / "x.pfm").string());
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == img.pixels);
  const auto raw = slurp(dir / "x.pfm");
  CHECK(raw.rfind("Pf\n3 2\n-1.0\n", 0) == 0);
  // Bottom row first on disk.
  float first;
  std::memcpy(&first, raw.data() + std::string("Pf\n3 2\n-1.0\n").size(), 4);
  CHECK(first == 3.f);
  write_pgm((dir / "x.pgm").string(), img);
  const auto pgm = slurp(dir / "x.pgm");
  const auto body = pgm.substr(pgm.size() - 6);
  CHECK(static_cast<unsigned char>(body[0]) == 0);
  CHECK(static_cast<unsigned char>(body[4]) == 0);
  CHECK(static_cast<unsigned char>(body[5]) == 255);
  CHECK_THROWS(read_pfm((dir / "x.pgm").string()));
}

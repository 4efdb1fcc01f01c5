#include <numeric>

#include "doctest.h"
#include "shelf/errors.hpp"
#include "shelf/generate.hpp"
#include "shelf/occupancy.hpp"
#include "support.hpp"

using namespace shelf;

namespace {

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Scene random_scene(std::uint64_t seed, int n) {
  GenerationConfig cfg;
  cfg.n_objects = n;
  return sample_scene(cfg, seed);
}

}  // namespace

TEST_CASE("empty shelf hides nothing") {
  const Scene s = testing::empty_scene();
  const auto grid = PlacementGrid::for_shelf(s.shelf);
  const auto t = TargetSpec::make(AspectRatio::Cube);
  CHECK(hidden_placements(s, t, grid).empty());
  CHECK(hidden_placements_exhaustive(s, t, grid).empty());
}

TEST_CASE("placement grid geometry") {
  const auto g = PlacementGrid::for_shelf(ShelfConfig{});
  CHECK(g.nx() == 60);
  CHECK(g.nz() == 60);
  CHECK(g.center(0).x == doctest::Approx(0.005));
  CHECK(g.center(g.cell_count() - 1).y == doctest::Approx(0.595));
}

TEST_CASE("hybrid equals exhaustive on random scenes") {
  const auto grid = PlacementGrid::for_shelf(ShelfConfig{}, 0.02);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Scene s = random_scene(seed, 4 + static_cast<int>(seed % 7));
    for (auto a : {AspectRatio::Thin, AspectRatio::Cube, AspectRatio::Tall}) {
      const auto t = TargetSpec::make(a);
      const auto hybrid = hidden_placements(s, t, grid, Exec::Serial);
      CHECK(hybrid == hidden_placements_exhaustive(s, t, grid, Exec::Serial));
      CHECK(hybrid == hidden_placements(s, t, grid, Exec::Parallel));
      for (int idx : hybrid.hidden) CHECK(placement_collision_free(s, t, grid.center(idx)));
    }
  }
}

TEST_CASE("hidden cells lie in the front box's shadow cone") {
  const Scene s = testing::scene_with({testing::box(0, 0.2, 0.05, 0.4, 0.15, 0.25)});
  const auto grid = PlacementGrid::for_shelf(s.shelf);
  const auto hps = hidden_placements(s, TargetSpec::make(AspectRatio::Thin), grid);
  REQUIRE_FALSE(hps.empty());
  const Point2 vp = s.camera.floor_point();
  // Similar triangles from the camera's floor point through the box's front corners.
  for (int idx : hps.hidden) {
    const Point2 c = grid.center(idx);
    CHECK(c.y > 0.15);
    const double t = (c.y - vp.y) / (0.05 - vp.y);
    CHECK(c.x > vp.x + (0.2 - vp.x) * t);
    CHECK(c.x < vp.x + (0.4 - vp.x) * t);
  }
}

TEST_CASE("removing an occluder only uncovers the space it stood on") {
  const auto grid = PlacementGrid::for_shelf(ShelfConfig{}, 0.02);
  const auto t = TargetSpec::make(AspectRatio::Cube);
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const Scene s = random_scene(seed, 6);
    const auto full = hidden_placements(s, t, grid);
    Scene less = s;
    less.objects.erase(less.objects.begin() + static_cast<long>(seed % s.objects.size()));
    const auto fewer = hidden_placements(less, t, grid);
    for (int idx : fewer.hidden) {
      if (!placement_collision_free(s, t, grid.center(idx))) continue;
      CHECK(std::binary_search(full.hidden.begin(), full.hidden.end(), idx));
    }
  }
}

TEST_CASE("distribution of one placement") {
  const Scene s = testing::empty_scene();
  const auto grid = PlacementGrid::for_shelf(s.shelf);
  const auto t = TargetSpec::make(AspectRatio::Cube);
  const HiddenPlacementSet hps{grid, {grid.nx() * 40 + 30}};
  const auto [d2, d1] = distribution_from_placements(s, t, hps);
  CHECK(total(d1.values) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(total(d2.values) == doctest::Approx(1.0).epsilon(1e-12));
  const Point2 c = grid.center(hps.hidden[0]);
  std::vector<int> hits(s.camera.image_width, 0);
  for (const auto& p : t.sample_points)
    ++hits[static_cast<int>(std::floor(s.camera.project({c.x + p.x, p.y, c.y + p.z})->x))];
  for (int x = 0; x < s.camera.image_width; ++x) CHECK(d1.values[x] == doctest::Approx(hits[x] / 26.0).epsilon(1e-12));
}

TEST_CASE("two disjoint placements split the mass") {
  const Scene s = testing::empty_scene();
  const auto grid = PlacementGrid::for_shelf(s.shelf);
  const auto t = TargetSpec::make(AspectRatio::Thin);
  const HiddenPlacementSet hps{grid, {grid.nx() * 30 + 5, grid.nx() * 30 + 54}};
  const auto d = column_distribution(s, t, hps);
  double left = 0.0, right = 0.0;
  for (int x = 0; x < s.camera.image_width; ++x) (x < s.camera.image_width / 2 ? left : right) += d.values[x];
  CHECK(left == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(right == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("1D distribution equals the 2D column sums") {
  const auto grid = PlacementGrid::for_shelf(ShelfConfig{});
  const auto t = TargetSpec::make(AspectRatio::Tall);
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    const Scene s = random_scene(seed, 7);
    const auto hps = hidden_placements(s, t, grid);
    const auto [d2, d1] = distribution_from_placements(s, t, hps);
    CHECK(column_distribution(s, t, hps) == d1);
    for (int x = 0; x < d2.width; ++x) {
      double col = 0.0;
      for (int y = 0; y < d2.height; ++y) col += d2.at(x, y);
      CHECK(col == doctest::Approx(d1.values[x]).epsilon(1e-12));
    }
    if (!hps.empty()) CHECK(total(d1.values) == doctest::Approx(1.0).epsilon(1e-9));
    else CHECK(total(d1.values) == 0.0);
  }
}

TEST_CASE("history min") {
  const auto p = OccupancyDist1D::from_values({0.2, 0.8, 0.0});
  const auto q = OccupancyDist1D::from_values({0.5, 0.1, 0.4});
  CHECK(history_min(p, p) == p);
  CHECK(history_min(p, OccupancyDist1D::from_values({0, 0, 0})).support == 0);
  CHECK(history_min(p, q).values == std::vector<double>{0.2, 0.1, 0.0});
  CHECK(history_min(p, OccupancyDist1D{}) == p);
  CHECK_THROWS_AS(history_min(p, OccupancyDist1D::from_values({1.0})), LengthMismatch);
}

TEST_CASE("support") {
  CHECK(support(OccupancyDist1D::from_values({0, 0, 0})) == 0);
  CHECK(support(OccupancyDist1D::from_values({0.5, 0.5, 0, 0})) == 2);
  CHECK(support(OccupancyDist1D::from_values({1e-13, 1.0})) == 1);
  testing::Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(16), b(16);
    for (auto& v : a) v = rng.coin(0.4) ? 0.0 : rng.uniform(0, 1);
    for (auto& v : b) v = rng.coin(0.4) ? 0.0 : rng.uniform(0, 1);
    const auto pa = OccupancyDist1D::from_values(a), pb = OccupancyDist1D::from_values(b);
    CHECK(support(history_min(pa, pb)) <= std::min(support(pa), support(pb)));
  }
}

TEST_CASE("entropy") {
  CHECK(entropy(OccupancyDist1D::from_values({0, 0})) == 0.0);
  CHECK(entropy(OccupancyDist1D::from_values({0, 1, 0})) == 0.0);
  CHECK(entropy(OccupancyDist1D::from_values({0.5, 0.5})) == doctest::Approx(0.693147180559945).epsilon(1e-12));
  for (int n : {2, 10, 256}) {
    const auto u = OccupancyDist1D::from_values(std::vector<double>(n, 1.0 / n));
    CHECK(std::abs(entropy(u) - std::log(n)) < 1e-9);
  }
}

TEST_CASE("perception: normalization, entropy bound, monotone history") {
  const auto grid = PlacementGrid::for_shelf(ShelfConfig{});
  const auto t = TargetSpec::make(AspectRatio::Cube);
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    Scene s = random_scene(seed, 6);
    OccupancyDist1D hist;
    int last = 1 << 30;
    for (std::size_t k = 0; k < s.objects.size(); ++k) {
      const auto d = perceive(s, t, grid);
      const double sum = total(d.values);
      CHECK((sum == 0.0 || std::abs(sum - 1.0) <= 1e-9));
      CHECK(entropy(d) <= std::log(d.values.size()) + 1e-12);
      CHECK((entropy(d) == 0.0) == (d.support <= 1));
      hist = history_min(d, hist);
      CHECK(hist.support <= last);
      last = hist.support;
      auto& o = s.objects[k];
      o = o.moved_to({o.pose.x, std::min(o.pose.z + 0.05, s.shelf.depth - o.footprint.bounds().hi.y + o.pose.z), o.pose.yaw});
      if (!scene_violations(s).empty()) break;
    }
  }
}

TEST_CASE("distribution json round trip") {
  const auto d = OccupancyDist1D::from_values({0.1, 0.2, 0.30000000000000004, 0.39999999999999997});
  const auto back = distribution_from_json(distribution_to_json(d));
  CHECK(back == d);
  CHECK(distribution_to_json(d).find("\"support\"") != std::string::npos);
}

TEST_CASE("perception follows a partly visible target") {
  const auto grid = PlacementGrid::for_shelf(ShelfConfig{});
  // Occluder face in the plane x = camera x hides the target's left half.
  Scene s = testing::with_target(testing::scene_with({testing::box(0, 0.1, 0.1, 0.3, 0.2, 0.6)}),
                                 AspectRatio::Cube, 0.3, 0.4);
  const auto d = perceive(s, s.target->spec, grid);
  CHECK(total(d.values) == doctest::Approx(1.0).epsilon(1e-12));
  const auto prisms = s.occluder_prisms();
  std::vector<int> hits(s.camera.image_width, 0);
  int hidden = 0;
  for (const auto& p : s.target->world_points()) {
    if (!ray_occluded_3d(s.camera.position, p, prisms)) continue;
    ++hits[static_cast<int>(std::floor(s.camera.project(p)->x))];
    ++hidden;
  }
  REQUIRE(hidden > 0);
  REQUIRE(hidden < static_cast<int>(s.target->world_points().size()));
  for (int x = 0; x < s.camera.image_width; ++x)
    CHECK(d.values[x] == doctest::Approx(static_cast<double>(hits[x]) / hidden).epsilon(1e-12));
  for (int x = static_cast<int>(s.camera.cx) + 1; x < s.camera.image_width; ++x) CHECK(d.values[x] == 0.0);

  // Fully hidden: the target plays no part.
  const Scene hidden_scene = testing::with_target(
      testing::scene_with({testing::box(0, 0.15, 0.1, 0.45, 0.2, 0.4)}), AspectRatio::Cube, 0.3, 0.4);
  CHECK(perceive(hidden_scene, hidden_scene.target->spec, grid) ==
        perceive(hidden_scene.without_target(), hidden_scene.target->spec, grid));
}

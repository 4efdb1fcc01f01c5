#include "shelf/generate.hpp"

#include <numbers>
#include <random>

#include "shelf/errors.hpp"

namespace shelf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [lo, hi) from 53 random bits; stable across standard libraries.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform(rng, 0.0, static_cast<double>(n))) % n;
}

ObjectShape sample_shape(const GenerationConfig& cfg, std::mt19937_64& rng, double& yaw) {
  const double lo = cfg.min_extent, hi = cfg.max_extent;
  yaw = 0.0;
  if (uniform(rng, 0.0, 1.0) < cfg.cylinder_probability) {
    // Upright only: lying cylinders would roll under a push.
    const double diameter = uniform(rng, lo, hi);
    const double height = uniform(rng, lo, hi);
    return ObjectShape::cylinder(diameter / 2.0, height);
  }
  double e[3] = {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
  // Rest on one of the three face pairs: pick which extent is vertical.
  const auto up = uniform_index(rng, 3);
  std::swap(e[up], e[2]);
  yaw = uniform_index(rng, 2) == 0 ? 0.0 : std::numbers::pi / 2.0;
  return ObjectShape::cuboid(e[0], e[1], e[2]);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

Scene sample_scene(const GenerationConfig& cfg, std::uint64_t seed, std::vector<std::string>* warnings) {
  if (cfg.n_objects < 2 || cfg.n_objects > 12) throw GenerationFailed("n_objects must be in [2, 12]");
  if (!(cfg.min_extent > 0.0) || cfg.max_extent < cfg.min_extent)
    throw GenerationFailed("invalid extent range");

  Scene scene;
  scene.shelf = cfg.shelf;
  scene.camera = CameraModel::default_for(cfg.shelf, cfg.image_width, cfg.image_height);
  scene.seed = seed;
  std::mt19937_64 rng(seed);

  int next_id = 0;
  for (int i = 0; i < cfg.n_objects; ++i) {
    double yaw = 0.0;
    const ObjectShape shape = sample_shape(cfg, rng, yaw);
    const Box2 local = footprint_of(shape, {0.0, 0.0, yaw}).bounds();
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
      const double x = uniform(rng, -local.lo.x, cfg.shelf.width - local.hi.x);
      const double z = uniform(rng, -local.lo.y, cfg.shelf.depth - local.hi.y);
      auto obj = ObjectInstance::make(next_id, shape, {x, z, yaw});
      bool clear = true;
      for (const auto& other : scene.objects) {
        if (polygons_intersect(obj.footprint, other.footprint, 0.0)) {
          clear = false;
          break;
        }
      }
      if (clear) {
        scene.objects.push_back(std::move(obj));
        ++next_id;
        placed = true;
      }
    }
    if (!placed && warnings) {
      warnings->push_back("object " + std::to_string(i) + " dropped after " + std::to_string(cfg.max_attempts) +
                          " placement attempts");
    }
  }
  if (scene.objects.size() < 2) throw GenerationFailed("fewer than two objects could be placed");
  return scene;
}

Scene place_target_hidden(const Scene& scene, const TargetSpec& target, std::uint64_t seed,
                          const PlacementGrid& grid) {
  const Scene bare = scene.without_target();
  const auto hps = hidden_placements(bare, target, grid);
  if (hps.empty()) throw NoHiddenPlacement();
  std::mt19937_64 rng(mix_seed(seed, 0x7a12));
  const int cell = hps.hidden[uniform_index(rng, hps.hidden.size())];
  const Point2 c = grid.center(cell);
  Scene out = bare;
  out.target = PlacedTarget{target, c.x, c.y};
  return out;
}

Scene place_target_hidden(const Scene& scene, const TargetSpec& target, std::uint64_t seed) {
  return place_target_hidden(scene, target, seed, PlacementGrid::for_shelf(scene.shelf));
}

}  // namespace shelf

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "shelf/generate.hpp"
#include "shelf/geom2d.hpp"
#include "shelf/scene.hpp"

namespace testing {

using namespace shelf;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  Point2 in_disk(Point2 c, double r) {
    const double a = uniform(0.0, 2.0 * std::numbers::pi);
    const double s = r * std::sqrt(uniform(0.0, 1.0));
    return {c.x + s * std::cos(a), c.y + s * std::sin(a)};
  }
};

inline std::vector<Point2> disk_points(Rng& rng, int n, Point2 c = {0.0, 0.0}, double r = 1.0) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(rng.in_disk(c, r));
  return pts;
}

inline ConvexPolygon random_convex(Rng& rng, Point2 c, double r, int n_min = 3, int n_max = 9) {
  for (;;) {
    const auto pts = disk_points(rng, rng.integer(n_min, n_max), c, r);
    ConvexPolygon p = convex_hull(pts);
    if (!p.degenerate() && p.area() > 1e-4 * r * r) return p;
  }
}

/// Pairwise-disjoint convex obstacles inside `box`, none containing `keep_out`.
inline std::vector<ConvexPolygon> random_obstacles(Rng& rng, int n, const Box2& box, Point2 keep_out) {
  std::vector<ConvexPolygon> out;
  for (int tries = 0; static_cast<int>(out.size()) < n && tries < 200 * n; ++tries) {
    const double r = rng.uniform(0.03, 0.12);
    const Point2 c{rng.uniform(box.lo.x + r, box.hi.x - r), rng.uniform(box.lo.y + r, box.hi.y - r)};
    ConvexPolygon p = random_convex(rng, c, r);
    if (p.contains(keep_out, 1e-6)) continue;
    bool clear = true;
    for (const auto& q : out) clear = clear && polygon_distance(p, q) > 1e-4;
    if (clear) out.push_back(std::move(p));
  }
  return out;
}

/// Distance from `p` to the closest point on the closed polyline boundary.
inline double boundary_distance(Point2 p, const std::vector<Point2>& ring) {
  double best = INFINITY;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point2 a = ring[i], b = ring[(i + 1) % ring.size()];
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, norm(p - (a + ab * t)));
  }
  return best;
}

inline Scene empty_scene() {
  Scene s;
  s.camera = CameraModel::default_for(s.shelf);
  return s;
}

inline Scene scene_with(std::vector<ObjectInstance> objects) {
  Scene s = empty_scene();
  s.objects = std::move(objects);
  return s;
}

inline ObjectInstance box(int id, double x0, double z0, double x1, double z1, double h) {
  return ObjectInstance::make(id, ObjectShape::cuboid(x1 - x0, z1 - z0, h), {(x0 + x1) / 2.0, (z0 + z1) / 2.0, 0.0});
}

inline Scene with_target(Scene s, AspectRatio a, double x, double z) {
  s.target = PlacedTarget{TargetSpec::make(a), x, z};
  return s;
}

}  // namespace testing

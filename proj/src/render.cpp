#include "shelf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shelf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Entry parameter of the ray o + t d into a vertical prism, or +inf.
double prism_entry(Point3 o, Point3 d, const Prism& prism) {
  double t0 = 0.0, t1 = kInf;
  auto clip = [&](double f0, double df) {
    // Keep t where f0 + t df >= 0.
    if (std::abs(df) < 1e-15) return f0 >= 0.0;
    const double t = -f0 / df;
    if (df > 0.0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
    return t0 < t1;
  };
  if (!clip(o.y, d.y) || !clip(prism.height - o.y, -d.y)) return kInf;
  const auto& fp = prism.footprint;
  const std::size_t n = fp.size();
  if (n < 3) return kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = fp[i], b = fp[(i + 1) % n];
    const Point2 e = b - a;
    // Left-of-edge distance, linear in t.
    const double f0 = cross(e, Point2{o.x, o.z} - a);
    const double df = cross(e, Point2{d.x, d.z});
    if (!clip(f0, df)) return kInf;
  }
  return t0 > 0.0 ? t0 : kInf;
}

RayHit shelf_hit(const ShelfConfig& shelf, Point3 o, Point3 d) {
  double best = kInf;
  auto consider = [&](double t, bool ok) {
    if (ok && t > 0.0) best = std::min(best, t);
  };
  const double eps = 1e-12;
  if (shelf.floor && d.y < 0.0) {
    const double t = -o.y / d.y;
    const Point3 p = o + d * t;
    consider(t, p.x >= -eps && p.x <= shelf.width + eps && p.z >= -eps && p.z <= shelf.depth + eps);
  }
  if (shelf.left_wall && d.x < 0.0) {
    const double t = -o.x / d.x;
    const Point3 p = o + d * t;
    consider(t, p.y >= -eps && p.y <= shelf.height + eps && p.z >= -eps && p.z <= shelf.depth + eps);
  }
  if (shelf.right_wall && d.x > 0.0) {
    const double t = (shelf.width - o.x) / d.x;
    const Point3 p = o + d * t;
    consider(t, p.y >= -eps && p.y <= shelf.height + eps && p.z >= -eps && p.z <= shelf.depth + eps);
  }
  const double t_back = d.z > 0.0 ? (shelf.depth - o.z) / d.z : kInf;
  if (shelf.back_wall && d.z > 0.0) {
    const Point3 p = o + d * t_back;
    consider(t_back, p.x >= -eps && p.x <= shelf.width + eps && p.y >= -eps && p.y <= shelf.height + eps);
  }
  // Nothing closer: report the back-wall plane.
  if (best == kInf) best = t_back;
  return {best, kHitShelf};
}

struct Tracer {
  const Scene& scene;
  std::vector<Prism> prisms;
  std::vector<int> ids;
  bool with_shelf = true;

  Tracer(const Scene& s, bool objects, bool target, bool shelf) : scene(s), with_shelf(shelf) {
    if (objects) {
      for (const auto& o : s.objects) {
        prisms.push_back(o.prism);
        ids.push_back(o.id);
      }
    }
    if (target && s.target) {
      prisms.push_back(s.target->prism());
      ids.push_back(kHitTarget);
    }
  }

  RayHit trace(double u, double v) const {
    const Point3 o = scene.camera.position;
    const Point3 d = scene.camera.ray_direction(u, v);
    RayHit hit = with_shelf ? shelf_hit(scene.shelf, o, d) : RayHit{kInf, kHitNone};
    for (std::size_t i = 0; i < prisms.size(); ++i) {
      const double t = prism_entry(o, d, prisms[i]);
      if (t < hit.distance) hit = {t, ids[i]};
    }
    const double len = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    if (hit.distance < kInf) hit.distance *= len;
    return hit;
  }
};

}  // namespace

RayHit cast_pixel(const Scene& scene, double u, double v, bool include_target) {
  return Tracer(scene, true, include_target, true).trace(u, v);
}

DepthRaster render_depth(const Scene& scene, Exec exec) {
  const int w = scene.camera.image_width, h = scene.camera.image_height;
  DepthRaster r{w, h, std::vector<float>(static_cast<std::size_t>(w) * h), std::vector<int>(static_cast<std::size_t>(w) * h)};
  const Tracer tracer(scene, true, true, true);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const RayHit hit = tracer.trace(x + 0.5, y + 0.5);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      r.depth[i] = static_cast<float>(hit.distance);
      r.hit[i] = hit.id;
    }
  }
  return r;
}

double target_visibility_fraction(const Scene& scene, std::vector<std::string>* warnings) {
  if (!scene.target) return 0.0;
  const auto& cam = scene.camera;
  const auto& t = *scene.target;
  double u0 = kInf, u1 = -kInf, v0 = kInf, v1 = -kInf;
  for (double x : {t.x - t.spec.width / 2.0, t.x + t.spec.width / 2.0})
    for (double y : {0.0, t.spec.height})
      for (double z : {t.z - t.spec.depth / 2.0, t.z + t.spec.depth / 2.0}) {
        const auto uv = cam.project({x, y, z});
        if (!uv) continue;
        u0 = std::min(u0, uv->x);
        u1 = std::max(u1, uv->x);
        v0 = std::min(v0, uv->y);
        v1 = std::max(v1, uv->y);
      }
  const int x0 = std::max(0, static_cast<int>(std::floor(u0)));
  const int x1 = std::min(cam.image_width - 1, static_cast<int>(std::floor(u1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(v0)));
  const int y1 = std::min(cam.image_height - 1, static_cast<int>(std::floor(v1)));

  const Tracer full(scene, true, true, true);
  const Tracer solo(scene, false, true, true);
  long seen = 0, total = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (solo.trace(x + 0.5, y + 0.5).id != kHitTarget) continue;
      ++total;
      if (full.trace(x + 0.5, y + 0.5).id == kHitTarget) ++seen;
    }
  }
  if (total == 0) {
    if (warnings) warnings->push_back("DegenerateTarget: target covers no pixels");
    return 0.0;
  }
  return static_cast<double>(seen) / static_cast<double>(total);
}

}  // namespace shelf

#include "shelf/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "shelf/errors.hpp"

namespace shelf {

namespace {

// Marks every grid cell whose center lies in the closed convex polygon.
template <typename Mark>
void rasterize(const ConvexPolygon& poly, const PlacementGrid& grid, Mark&& mark) {
  if (poly.size() < 3) return;
  const int nx = grid.nx(), nz = grid.nz();
  const Box2 b = poly.bounds();
  const double s = grid.spacing;
  const int j0 = std::max(0, static_cast<int>(std::floor((b.lo.y - grid.z_min) / s - 0.5)));
  const int j1 = std::min(nz - 1, static_cast<int>(std::ceil((b.hi.y - grid.z_min) / s - 0.5)));
  const std::size_t n = poly.size();
  for (int j = j0; j <= j1; ++j) {
    const double z = grid.z_min + (j + 0.5) * s;
    double xl = std::numeric_limits<double>::infinity();
    double xr = -xl;
    for (std::size_t k = 0; k < n; ++k) {
      const Point2 p = poly[k], q = poly[(k + 1) % n];
      const double lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
      if (z < lo - kGeomTol || z > hi + kGeomTol) continue;
      if (hi - lo <= kGeomTol) {
        xl = std::min({xl, p.x, q.x});
        xr = std::max({xr, p.x, q.x});
        continue;
      }
      const double t = std::clamp((z - p.y) / (q.y - p.y), 0.0, 1.0);
      const double x = p.x + t * (q.x - p.x);
      xl = std::min(xl, x);
      xr = std::max(xr, x);
    }
    if (xl > xr) continue;
    const int i0 = std::max(0, static_cast<int>(std::ceil((xl - kGeomTol - grid.x_min) / s - 0.5)));
    const int i1 = std::min(nx - 1, static_cast<int>(std::floor((xr + kGeomTol - grid.x_min) / s - 0.5)));
    for (int i = i0; i <= i1; ++i) mark(j * nx + i);
  }
}

// Marks every cell whose center, shifted by `shift`, lies in the simple
// polygon (even-odd scanline; boundary points count as inside up to rounding).
// Crossings are bucketed per row, so the cost is edges plus crossings.
template <typename Mark>
void rasterize_shifted(const SimplePolygon& poly, Point2 shift, const PlacementGrid& grid,
                       std::vector<std::vector<double>>& rows, Mark&& mark) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return;
  const int nx = grid.nx(), nz = grid.nz();
  const double s = grid.spacing;
  rows.resize(nz);
  for (auto& r : rows) r.clear();
  const double y0 = grid.z_min + 0.5 * s + shift.y;  // row 0 scanline
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 p = v[k], q = v[k + 1 == n ? 0 : k + 1];
    if (p.y == q.y) continue;
    const double lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
    // Rows with lo <= y < hi, matching the half-open crossing rule.
    const int ja = std::max(0, static_cast<int>(std::ceil((lo - y0) / s)) - 1);
    const int jb = std::min(nz - 1, static_cast<int>(std::floor((hi - y0) / s)) + 1);
    const double slope = (q.x - p.x) / (q.y - p.y);
    for (int j = ja; j <= jb; ++j) {
      const double y = y0 + j * s;
      if ((p.y <= y) != (q.y <= y)) rows[j].push_back(p.x + (y - p.y) * slope);
    }
  }
  for (int j = 0; j < nz; ++j) {
    auto& xs = rows[j];
    if (xs.size() < 2) continue;
    std::sort(xs.begin(), xs.end());
    for (std::size_t m = 0; m + 1 < xs.size(); m += 2) {
      const double xl = xs[m] - shift.x, xr = xs[m + 1] - shift.x;
      const int i0 = std::max(0, static_cast<int>(std::ceil((xl - grid.x_min) / s - 0.5)));
      const int i1 = std::min(nx - 1, static_cast<int>(std::floor((xr - grid.x_min) / s - 0.5)));
      for (int i = i0; i <= i1; ++i) mark(j * nx + i);
    }
  }
}

// Top layer first: high points are the likeliest to be seen.
bool all_points_occluded(const OcclusionQuery& q, const TargetSpec& target, Point2 c) {
  std::size_t hint = 0;
  for (auto it = target.sample_points.rbegin(); it != target.sample_points.rend(); ++it)
    if (!q.occluded({c.x + it->x, it->y, c.y + it->z}, hint)) return false;
  return true;
}

int count_occluded(const OcclusionQuery& q, const TargetSpec& target, Point2 c) {
  std::size_t hint = 0;
  int n = 0;
  for (const auto& p : target.sample_points) n += q.occluded({c.x + p.x, p.y, c.y + p.z}, hint) ? 1 : 0;
  return n;
}

// Hits per image cell (2D) or column (1D) of every sample point of every
// hidden placement. Integer counts make both normalizations agree exactly.
template <typename Hit>
std::uint64_t accumulate_hits(const CameraModel& cam, const TargetSpec& target, const HiddenPlacementSet& hps,
                              Hit&& hit) {
  std::uint64_t total = 0;
  for (int idx : hps.hidden) {
    const Point2 c = hps.grid.center(idx);
    for (const auto& p : target.sample_points) {
      const auto uv = cam.project({c.x + p.x, p.y, c.y + p.z});
      if (!uv) continue;
      const int col = static_cast<int>(std::floor(uv->x));
      const int row = static_cast<int>(std::floor(uv->y));
      if (col < 0 || col >= cam.image_width || row < 0 || row >= cam.image_height) continue;
      hit(row, col);
      ++total;
    }
  }
  return total;
}

std::vector<double> normalize_counts(const std::vector<std::uint64_t>& counts, std::uint64_t total) {
  std::vector<double> v(counts.size(), 0.0);
  if (total == 0) return v;
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < counts.size(); ++i) v[i] = static_cast<double>(counts[i]) * inv;
  return v;
}

// Separating-axis test of an axis-aligned target footprint against each
// occluder, with the occluder's axes and self-projections precomputed.
// Touching (gap >= -kGeomTol) is not a collision.
class PlacementChecker {
 public:
  PlacementChecker(const Scene& scene, const TargetSpec& target)
      : shelf_(scene.shelf), hw_(target.width / 2.0), hd_(target.depth / 2.0) {
    for (const auto& o : scene.objects) {
      const auto& fp = o.footprint;
      if (fp.empty()) continue;
      Shape sh{fp.bounds(), axes_.size(), axes_.size()};
      for (std::size_t i = 0, n = fp.size(); n >= 2 && i < (n == 2 ? 1 : n); ++i) {
        const Point2 e = fp[(i + 1) % n] - fp[i];
        const double len = norm(e);
        if (len == 0.0) continue;
        const Point2 axis{-e.y / len, e.x / len};
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& v : fp.vertices()) {
          lo = std::min(lo, dot(v, axis));
          hi = std::max(hi, dot(v, axis));
        }
        axes_.push_back({axis, lo, hi});
      }
      sh.last = axes_.size();
      shapes_.push_back(sh);
    }
  }

  bool free_at(Point2 c) const {
    if (c.x - hw_ < -kGeomTol || c.x + hw_ > shelf_.width + kGeomTol || c.y - hd_ < -kGeomTol ||
        c.y + hd_ > shelf_.depth + kGeomTol)
      return false;
    const Box2 t{{c.x - hw_, c.y - hd_}, {c.x + hw_, c.y + hd_}};
    for (const auto& sh : shapes_) {
      if (!t.overlaps(sh.bounds)) continue;
      if (t.hi.x <= sh.bounds.lo.x + kGeomTol || sh.bounds.hi.x <= t.lo.x + kGeomTol) continue;
      if (t.hi.y <= sh.bounds.lo.y + kGeomTol || sh.bounds.hi.y <= t.lo.y + kGeomTol) continue;
      bool separated = false;
      for (std::size_t k = sh.first; k < sh.last && !separated; ++k) {
        const Axis& a = axes_[k];
        const double mid = dot(c, a.dir);
        const double r = hw_ * std::abs(a.dir.x) + hd_ * std::abs(a.dir.y);
        separated = mid + r <= a.lo + kGeomTol || a.hi <= mid - r + kGeomTol;
      }
      if (!separated) return false;
    }
    return true;
  }

 private:
  struct Axis {
    Point2 dir;
    double lo, hi;
  };
  struct Shape {
    Box2 bounds;
    std::size_t first, last;
  };
  ShelfConfig shelf_;
  double hw_, hd_;
  std::vector<Axis> axes_;
  std::vector<Shape> shapes_;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PlacementGrid PlacementGrid::for_shelf(const ShelfConfig& shelf, double spacing) {
  return {0.0, shelf.width, 0.0, shelf.depth, spacing};
}

int PlacementGrid::nx() const { return static_cast<int>(std::lround((x_max - x_min) / spacing)); }
int PlacementGrid::nz() const { return static_cast<int>(std::lround((z_max - z_min) / spacing)); }

Point2 PlacementGrid::center(int index) const {
  const int n = nx();
  return {x_min + (index % n + 0.5) * spacing, z_min + (index / n + 0.5) * spacing};
}

bool placement_collision_free(const Scene& scene, const TargetSpec& target, Point2 c) {
  return PlacementChecker(scene, target).free_at(c);
}

SimplePolygon floor_visibility(const Scene& scene) {
  const Point2 vp = scene.camera.floor_point();
  std::vector<Point2> pts = scene.shelf.floor_rect().vertices();
  pts.push_back(vp);
  const ConvexPolygon boundary = convex_hull(pts);
  const auto obstacles = scene.occluder_footprints();
  return visibility_polygon(vp, boundary, obstacles);
}

HiddenPlacementSet hidden_placements(const Scene& scene, const TargetSpec& target, const PlacementGrid& grid,
                                     Exec exec, Prefilter prefilter) {
  HiddenPlacementSet out{grid, {}};
  if (scene.objects.empty()) return out;

  const SimplePolygon visible = floor_visibility(scene);
  const int cells = grid.cell_count();
  std::vector<unsigned char> seen(cells, 0);
  const auto mark = [&seen](int idx) { seen[idx] = 1; };
  if (prefilter == Prefilter::BaseSamples) {
    // Translates of a point are just shifted scanlines; no sums needed.
    std::vector<std::vector<double>> rows;
    for (const auto& b : target.base_points()) rasterize_shifted(visible, b, grid, rows, mark);
  } else {
    const ConvexPolygon reflected = target.footprint_at({0.0, 0.0}).reflected();
    for (const auto& tri : fan_triangles(visible, scene.camera.floor_point()))
      rasterize(minkowski_sum_convex(tri, reflected), grid, mark);
  }

  const PlacementChecker checker(scene, target);
  std::vector<int> candidates;
  for (int i = 0; i < cells; ++i) {
    if (!seen[i] && checker.free_at(grid.center(i))) candidates.push_back(i);
  }

  const auto prisms = scene.occluder_prisms();
  const OcclusionQuery query(scene.camera.position, prisms);
  const int n = static_cast<int>(candidates.size());
  std::vector<unsigned char> hidden(n, 0);
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::Parallel)
  for (int k = 0; k < n; ++k) {
    hidden[k] = all_points_occluded(query, target, grid.center(candidates[k])) ? 1 : 0;
  }
  for (int k = 0; k < n; ++k)
    if (hidden[k]) out.hidden.push_back(candidates[k]);
  return out;
}

HiddenPlacementSet hidden_placements_exhaustive(const Scene& scene, const TargetSpec& target,
                                                const PlacementGrid& grid, Exec exec) {
  HiddenPlacementSet out{grid, {}};
  const auto prisms = scene.occluder_prisms();
  const OcclusionQuery query(scene.camera.position, prisms);
  const PlacementChecker checker(scene, target);
  const int cells = grid.cell_count();
  const int points = static_cast<int>(target.sample_points.size());
  std::vector<unsigned char> hidden(cells, 0);
#pragma omp parallel for schedule(dynamic, 32) if (exec == Exec::Parallel)
  for (int i = 0; i < cells; ++i) {
    const Point2 c = grid.center(i);
    if (!checker.free_at(c)) continue;
    hidden[i] = count_occluded(query, target, c) == points ? 1 : 0;
  }
  for (int i = 0; i < cells; ++i)
    if (hidden[i]) out.hidden.push_back(i);
  return out;
}

OccupancyDist1D OccupancyDist1D::from_values(std::vector<double> v) {
  OccupancyDist1D d{std::move(v), 0};
  d.support = shelf::support(d);
  return d;
}

std::pair<OccupancyDist2D, OccupancyDist1D> distribution_from_placements(const Scene& scene,
                                                                         const TargetSpec& target,
                                                                         const HiddenPlacementSet& hps) {
  const auto& cam = scene.camera;
  const int w = cam.image_width, h = cam.image_height;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::uint64_t> cols(w, 0);
  const std::uint64_t total = accumulate_hits(cam, target, hps, [&](int row, int col) {
    ++counts[static_cast<std::size_t>(row) * w + col];
    ++cols[col];
  });
  OccupancyDist2D d2{w, h, normalize_counts(counts, total)};
  return {std::move(d2), OccupancyDist1D::from_values(normalize_counts(cols, total))};
}

OccupancyDist1D column_distribution(const Scene& scene, const TargetSpec& target, const HiddenPlacementSet& hps) {
  std::vector<std::uint64_t> cols(scene.camera.image_width, 0);
  const std::uint64_t total = accumulate_hits(scene.camera, target, hps, [&](int, int col) { ++cols[col]; });
  return OccupancyDist1D::from_values(normalize_counts(cols, total));
}

OccupancyDist1D history_min(const OccupancyDist1D& current, const OccupancyDist1D& previous) {
  if (previous.values.empty()) return current;
  if (previous.values.size() != current.values.size()) throw LengthMismatch();
  std::vector<double> v(current.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(current.values[i], previous.values[i]);
  return OccupancyDist1D::from_values(std::move(v));
}

int support(const OccupancyDist1D& d) {
  return static_cast<int>(std::count_if(d.values.begin(), d.values.end(), [](double v) { return v > kSupportEps; }));
}

double entropy(const OccupancyDist1D& d) {
  double h = 0.0;
  for (double p : d.values)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

OccupancyDist1D normalized(const OccupancyDist1D& d) {
  double sum = 0.0;
  for (double v : d.values) sum += v;
  if (sum <= 0.0) return d;
  std::vector<double> v(d.values);
  for (auto& x : v) x /= sum;
  return OccupancyDist1D::from_values(std::move(v));
}

OccupancyDist1D perceive(const Scene& scene, const TargetSpec& target, const PlacementGrid& grid, Exec exec) {
  if (scene.target) {
    const auto prisms = scene.occluder_prisms();
    const auto points = scene.target->world_points();
    std::vector<std::uint64_t> cols(scene.camera.image_width, 0);
    std::uint64_t hidden = 0, counted = 0;
    for (const auto& p : points) {
      if (!ray_occluded_3d(scene.camera.position, p, prisms)) continue;
      ++hidden;
      const auto px = scene.camera.project(p);
      if (!px) continue;
      const int col = static_cast<int>(std::floor(px->x));
      if (col < 0 || col >= scene.camera.image_width) continue;
      ++cols[col];
      ++counted;
    }
    // Once part of the target shows, its location is known: track what is still covered.
    if (hidden < points.size()) return OccupancyDist1D::from_values(normalize_counts(cols, counted));
  }
  const Scene occluders = scene.without_target();
  return column_distribution(occluders, target, hidden_placements(occluders, target, grid, exec));
}

std::string distribution_to_json(const OccupancyDist1D& d) {
  std::string s = "{\"image_width\": " + std::to_string(d.values.size()) + ", \"values\": [";
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (i) s += ", ";
    s += fmt17(d.values[i]);
  }
  s += "], \"support\": " + std::to_string(d.support) + "}\n";
  return s;
}

OccupancyDist1D distribution_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    auto values = j.at("values").get<std::vector<double>>();
    if (static_cast<std::size_t>(j.at("image_width").get<int>()) != values.size()) throw LengthMismatch();
    return OccupancyDist1D::from_values(std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw ShelfError(std::string("distribution parse error: ") + e.what());
  }
}

}  // namespace shelf

#include "shelf/geom2d.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "shelf/errors.hpp"

namespace shelf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

std::vector<Point2> rotate_to_lowest(const std::vector<Point2>& v) {
  const auto it = std::min_element(v.begin(), v.end(), [](Point2 a, Point2 b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
  });
  std::vector<Point2> out(v.begin(), v.end());
  std::rotate(out.begin(), out.begin() + (it - v.begin()), out.end());
  return out;
}

// Projection interval of `poly` onto `axis`.
std::array<double, 2> project(const ConvexPolygon& poly, Point2 axis) {
  double lo = kInf, hi = -kInf;
  for (const auto& v : poly.vertices()) {
    const double d = dot(v, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

// True when some edge normal of `a` separates a and b (gap >= -kGeomTol).
bool has_separating_axis(const ConvexPolygon& a, const ConvexPolygon& b) {
  const std::size_t n = a.size();
  if (n < 2) return false;
  const std::size_t edges = n == 2 ? 1 : n;
  for (std::size_t i = 0; i < edges; ++i) {
    const Point2 e = a[(i + 1) % n] - a[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    const Point2 axis{-e.y / len, e.x / len};
    const auto pa = project(a, axis);
    const auto pb = project(b, axis);
    if (pa[1] <= pb[0] + kGeomTol || pb[1] <= pa[0] + kGeomTol) return true;
  }
  return false;
}

std::size_t lowest_index(const ConvexPolygon& p, double sign) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const Point2 a = p[i] * sign, b = p[best] * sign;
    if (a.y < b.y || (a.y == b.y && a.x < b.x)) best = i;
  }
  return best;
}

// Vertices of p + (-q), CCW, by merging edge sequences. Both must be full
// polygons. The result lives in a per-thread buffer.
const std::vector<Point2>& difference_vertices(const ConvexPolygon& p, const ConvexPolygon& q) {
  thread_local std::vector<Point2> out;
  out.clear();
  const std::size_t n = p.size(), m = q.size();
  const std::size_t i0 = lowest_index(p, 1.0), j0 = lowest_index(q, -1.0);
  auto a = [&](std::size_t i) { return p[(i0 + i) % n]; };
  auto b = [&](std::size_t j) { return -q[(j0 + j) % m]; };
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    out.push_back(a(i) + b(j));
    const double c = cross(a(i + 1) - a(i), b(j + 1) - b(j));
    if (c >= 0.0 && i < n) ++i;
    if (c <= 0.0 && j < m) ++j;
  }
  return out;
}

// Largest signed distance of the origin outside an edge line of the CCW polygon `m`.
// Edge normals of p - q are those of p and q, so this is the best separating-axis gap.
double max_edge_gap(const std::vector<Point2>& m) {
  double best = -kInf;
  const std::size_t k = m.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Point2 e = m[(i + 1) % k] - m[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    best = std::max(best, cross(e, m[i]) / len);
  }
  return best;
}

double origin_distance(const std::vector<Point2>& m) {
  if (max_edge_gap(m) <= 0.0) return 0.0;
  double best = kInf;
  const std::size_t k = m.size();
  for (std::size_t i = 0; i < k; ++i) best = std::min(best, point_segment_distance({0.0, 0.0}, m[i], m[(i + 1) % k]));
  return best;
}

}  // namespace

double orient_dist(Point2 a, Point2 b, Point2 c) {
  const Point2 ab = b - a;
  const double len = norm(ab);
  if (len == 0.0) return 0.0;
  return cross(ab, c - a) / len;
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> ccw_vertices) : vertices_(std::move(ccw_vertices)) {
  if (vertices_.empty()) return;
  bounds_ = {vertices_[0], vertices_[0]};
  for (const auto& v : vertices_) {
    bounds_.lo.x = std::min(bounds_.lo.x, v.x);
    bounds_.lo.y = std::min(bounds_.lo.y, v.y);
    bounds_.hi.x = std::max(bounds_.hi.x, v.x);
    bounds_.hi.y = std::max(bounds_.hi.y, v.y);
  }
}

double ConvexPolygon::area() const {
  double a = 0.0;
  for (std::size_t i = 0, n = size(); i < n; ++i) a += cross(vertices_[i], vertices_[(i + 1) % n]);
  return 0.5 * a;
}

Point2 ConvexPolygon::centroid() const {
  if (size() < 3) {
    Point2 c{};
    for (const auto& v : vertices_) c = c + v;
    return size() ? c * (1.0 / static_cast<double>(size())) : c;
  }
  double a = 0.0;
  Point2 c{};
  for (std::size_t i = 0, n = size(); i < n; ++i) {
    const Point2 p = vertices_[i], q = vertices_[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    c = c + (p + q) * w;
  }
  return c * (1.0 / (3.0 * a));
}

bool ConvexPolygon::contains(Point2 p, double tol) const {
  const std::size_t n = size();
  if (n == 0) return false;
  if (n == 1) return norm(p - vertices_[0]) <= tol;
  if (n == 2) return point_segment_distance(p, vertices_[0], vertices_[1]) <= tol;
  if (p.x < bounds_.lo.x - tol || p.x > bounds_.hi.x + tol || p.y < bounds_.lo.y - tol ||
      p.y > bounds_.hi.y + tol)
    return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (orient_dist(vertices_[i], vertices_[(i + 1) % n], p) < -tol) return false;
  }
  return true;
}

bool ConvexPolygon::contains_interior(Point2 p, double tol) const {
  const std::size_t n = size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (orient_dist(vertices_[i], vertices_[(i + 1) % n], p) <= tol) return false;
  }
  return true;
}

ConvexPolygon ConvexPolygon::translated(Point2 d) const {
  std::vector<Point2> v(vertices_);
  for (auto& p : v) p = p + d;
  return ConvexPolygon(std::move(v));
}

ConvexPolygon ConvexPolygon::reflected() const {
  // Point reflection keeps CCW orientation.
  std::vector<Point2> v(vertices_);
  for (auto& p : v) p = -p;
  return ConvexPolygon(std::move(v));
}

double SimplePolygon::area() const {
  double a = 0.0;
  for (std::size_t i = 0, n = vertices.size(); i < n; ++i)
    a += cross(vertices[i], vertices[(i + 1) % n]);
  return 0.5 * a;
}

bool SimplePolygon::contains(Point2 p, double tol) const {
  const std::size_t n = vertices.size();
  if (n == 0) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = vertices[j], b = vertices[i];
    if (point_segment_distance(p, a, b) <= tol) return true;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

ConvexPolygon make_rect(double x0, double y0, double x1, double y1) {
  return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(),
            [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 1) return ConvexPolygon(std::move(pts));

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && orient_dist(hull[k - 2], hull[k - 1], p) <= kGeomTol) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Point2 p = pts[i];
    while (k >= lower && orient_dist(hull[k - 2], hull[k - 1], p) <= kGeomTol) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  if (hull.size() == 2 && norm(hull[1] - hull[0]) <= kGeomTol) hull.resize(1);
  return ConvexPolygon(std::move(hull));
}

ConvexPolygon minkowski_sum_convex(const ConvexPolygon& p, const ConvexPolygon& q) {
  if (p.empty()) return q;
  if (q.empty()) return p;
  if (p.degenerate() || q.degenerate()) {
    std::vector<Point2> sums;
    sums.reserve(p.size() * q.size());
    for (const auto& a : p.vertices())
      for (const auto& b : q.vertices()) sums.push_back(a + b);
    return convex_hull(sums);
  }

  // Merge the two edge sequences by polar angle, both starting at the lowest vertex.
  const auto a = rotate_to_lowest(p.vertices());
  const auto b = rotate_to_lowest(q.vertices());
  const std::size_t n = a.size(), m = b.size();
  std::vector<Point2> out;
  out.reserve(n + m);
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    out.push_back(a[i % n] + b[j % m]);
    const double c = cross(a[(i + 1) % n] - a[i % n], b[(j + 1) % m] - b[j % m]);
    if (c >= 0.0 && i < n) ++i;
    if (c <= 0.0 && j < m) ++j;
  }
  return convex_hull(out);
}

SimplePolygon visibility_polygon(Point2 viewpoint, const ConvexPolygon& boundary,
                                 std::span<const ConvexPolygon> obstacles) {
  for (const auto& o : obstacles) {
    if (o.contains_interior(viewpoint)) throw ViewpointInsideObstacle();
  }

  struct Segment {
    Point2 a, b;
  };
  std::vector<Segment> segments;
  std::vector<Point2> event_points;

  auto add_polygon = [&](const ConvexPolygon& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      event_points.push_back(poly[i]);
      if (n >= 2 && !(n == 2 && i == 1)) segments.push_back({poly[i], poly[(i + 1) % n]});
    }
  };
  add_polygon(boundary);
  for (const auto& o : obstacles) add_polygon(o);

  // Reference direction: along the boundary edge leaving the viewpoint when it
  // sits on the boundary, so every interior direction has angle in [0, pi].
  Point2 ref{1.0, 0.0};
  bool on_boundary = false;
  {
    const std::size_t n = boundary.size();
    for (std::size_t i = 0; i < n && !on_boundary; ++i) {
      const Point2 a = boundary[i], b = boundary[(i + 1) % n];
      if (point_segment_distance(viewpoint, a, b) <= kGeomTol) {
        on_boundary = true;
        // Leaving edge: if vp coincides with b, the next edge starts at vp.
        const Point2 dir = norm(b - viewpoint) <= kGeomTol ? boundary[(i + 2) % n] - b : b - a;
        ref = dir * (1.0 / norm(dir));
      }
    }
  }

  struct Event {
    double angle;
    Point2 dir;
  };
  std::vector<Event> events;
  events.reserve(event_points.size());
  for (const auto& p : event_points) {
    const Point2 d = p - viewpoint;
    const double len = norm(d);
    if (len <= kGeomTol) continue;
    if (!boundary.contains(p)) continue;
    events.push_back({std::atan2(cross(ref, d), dot(ref, d)), d * (1.0 / len)});
  }
  std::sort(events.begin(), events.end(),
            [](const Event& x, const Event& y) { return x.angle < y.angle; });

  // Group events sharing a direction; one ray per group.
  std::vector<Point2> rays;
  for (const auto& e : events) {
    if (!rays.empty() && std::abs(cross(rays.back(), e.dir)) <= kGeomTol &&
        dot(rays.back(), e.dir) > 0.0)
      continue;
    rays.push_back(e.dir);
  }
  if (!on_boundary && rays.size() > 1 && std::abs(cross(rays.back(), rays.front())) <= kGeomTol &&
      dot(rays.back(), rays.front()) > 0.0)
    rays.pop_back();

  SimplePolygon out;
  if (on_boundary) out.vertices.push_back(viewpoint);
  auto emit = [&](Point2 p) {
    if (out.vertices.empty() || norm(out.vertices.back() - p) > kGeomTol) out.vertices.push_back(p);
  };

  for (const Point2 dir : rays) {
    double before = kInf;  // clockwise side
    double after = kInf;   // counter-clockwise side
    for (const auto& s : segments) {
      const Point2 ra = s.a - viewpoint, rb = s.b - viewpoint;
      const double sa = cross(dir, ra), sb = cross(dir, rb);
      const double ta = dot(dir, ra), tb = dot(dir, rb);
      const bool a_on = std::abs(sa) <= kGeomTol;
      const bool b_on = std::abs(sb) <= kGeomTol;
      if (a_on && b_on) continue;
      if (a_on || b_on) {
        const double t = a_on ? ta : tb;
        const double side = a_on ? sb : sa;
        if (t <= kGeomTol) continue;
        if (side > 0.0) after = std::min(after, t);
        else before = std::min(before, t);
        continue;
      }
      if ((sa > 0.0) == (sb > 0.0)) continue;
      const double t = ta + (tb - ta) * sa / (sa - sb);
      if (t <= kGeomTol) continue;
      before = std::min(before, t);
      after = std::min(after, t);
    }
    if (before < kInf) emit(viewpoint + dir * before);
    if (after < kInf) emit(viewpoint + dir * after);
  }
  if (out.vertices.size() > 1 && norm(out.vertices.back() - out.vertices.front()) <= kGeomTol)
    out.vertices.pop_back();
  return out;
}

std::vector<ConvexPolygon> fan_triangles(const SimplePolygon& star, Point2 viewpoint) {
  std::vector<ConvexPolygon> tris;
  const auto& v = star.vertices;
  const std::size_t n = v.size();
  if (n < 2) return tris;
  const bool vp_first = norm(v[0] - viewpoint) <= kGeomTol;
  const std::size_t first = vp_first ? 1 : 0;
  const std::size_t last = vp_first ? n - 1 : n;  // exclusive upper index of i
  for (std::size_t i = first; i < last; ++i) {
    const std::size_t j = (i + 1) % n;
    if (vp_first && j == 0) break;
    const std::array<Point2, 3> pts{viewpoint, v[i], v[j]};
    auto tri = convex_hull(pts);
    if (tri.size() == 3 && tri.area() > kGeomTol * kGeomTol) tris.push_back(std::move(tri));
  }
  return tris;
}

double polygon_distance(const ConvexPolygon& p, const ConvexPolygon& q) {
  if (p.empty() || q.empty()) return kInf;
  if (!p.degenerate() && !q.degenerate()) return origin_distance(difference_vertices(p, q));
  double best = kInf;
  auto edge_pass = [&best](const ConvexPolygon& a, const ConvexPolygon& b) {
    const std::size_t n = b.size();
    for (const auto& v : a.vertices()) {
      if (n == 1) {
        best = std::min(best, norm(v - b[0]));
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) best = std::min(best, point_segment_distance(v, b[i], b[(i + 1) % n]));
    }
  };
  edge_pass(p, q);
  edge_pass(q, p);
  // Degenerate pieces can cross without any vertex near the other set.
  auto inside = [](const ConvexPolygon& a, const ConvexPolygon& b) {
    if (b.size() < 3) return false;
    for (const auto& v : a.vertices())
      if (b.contains(v, 0.0)) return true;
    return false;
  };
  auto crossing = [](const ConvexPolygon& seg, const ConvexPolygon& b) {
    if (seg.size() != 2 || b.size() < 2) return false;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Point2 a = b[i], c = b[(i + 1) % b.size()];
      const double s1 = cross(seg[1] - seg[0], a - seg[0]), s2 = cross(seg[1] - seg[0], c - seg[0]);
      const double s3 = cross(c - a, seg[0] - a), s4 = cross(c - a, seg[1] - a);
      if (((s1 > 0) != (s2 > 0)) && ((s3 > 0) != (s4 > 0))) return true;
    }
    return false;
  };
  if (inside(p, q) || inside(q, p) || crossing(p, q) || crossing(q, p)) return 0.0;
  return best;
}

bool polygons_intersect(const ConvexPolygon& p, const ConvexPolygon& q, double clearance) {
  if (p.empty() || q.empty()) return false;
  if (clearance > 0.0) {
    const Box2 bp = p.bounds(), bq = q.bounds();
    if (!bp.overlaps(bq, clearance)) return false;
    return polygon_distance(p, q) < clearance;
  }
  if (p.degenerate() && q.degenerate()) return false;
  if (!p.bounds().overlaps(q.bounds())) return false;
  if (!p.degenerate() && !q.degenerate()) return max_edge_gap(difference_vertices(p, q)) < -kGeomTol;
  return !has_separating_axis(p, q) && !has_separating_axis(q, p);
}

namespace {

Point2 unit_normal(Point2 e, double len) { return {-e.y / len, e.x / len}; }

// Shrinks [t0, t1] by one half-plane f(t) >= 0 with f linear from f0 to f1.
bool clip_edge(double f0, double f1, double& t0, double& t1) {
  if (f0 < 0.0 && f1 < 0.0) return false;
  if (f0 >= 0.0 && f1 >= 0.0) return true;
  const double t = f0 / (f0 - f1);
  if (f0 < 0.0) t0 = std::max(t0, t);
  else t1 = std::min(t1, t);
  return t0 < t1;
}

}  // namespace

std::optional<std::array<double, 2>> clip_segment(Point2 a, Point2 b, const ConvexPolygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return std::nullopt;
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = poly[i], e = poly[(i + 1) % n] - p;
    const double len = norm(e);
    if (len == 0.0) continue;
    // Inside means at least kGeomTol left of each edge: grazing is not crossing.
    const Point2 nrm = unit_normal(e, len);
    if (!clip_edge(dot(nrm, a - p) - kGeomTol, dot(nrm, b - p) - kGeomTol, t0, t1)) return std::nullopt;
  }
  if (t1 <= t0) return std::nullopt;
  return std::array<double, 2>{t0, t1};
}

bool segment_crosses_interior(Point2 a, Point2 b, const ConvexPolygon& poly) {
  return clip_segment(a, b, poly).has_value();
}

OcclusionQuery::OcclusionQuery(Point3 camera, std::span<const Prism> prisms) : camera_(camera) {
  const Point2 a{camera.x, camera.z};
  for (const auto& prism : prisms) {
    const auto& fp = prism.footprint;
    if (prism.height <= 0.0 || fp.size() < 3) continue;
    Entry entry{fp.bounds(), prism.height, edges_.size(), edges_.size()};
    for (std::size_t i = 0, n = fp.size(); i < n; ++i) {
      const Point2 p = fp[i], e = fp[(i + 1) % n] - p;
      const double len = norm(e);
      if (len == 0.0) continue;
      const Point2 nrm = unit_normal(e, len);
      edges_.push_back({p, nrm, dot(nrm, a - p) - kGeomTol});
    }
    entry.last = edges_.size();
    prisms_.push_back(entry);
  }
}

bool OcclusionQuery::blocks(const Entry& prism, Point3 target_point, const Box2& seg) const {
  if (!seg.overlaps(prism.bounds)) return false;
  const Point2 b{target_point.x, target_point.z};
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t k = prism.first; k < prism.last; ++k) {
    const Edge& e = edges_[k];
    if (!clip_edge(e.f0, dot(e.normal, b - e.origin) - kGeomTol, t0, t1)) return false;
  }
  if (t1 <= t0) return false;
  // Height is linear in t, so its minimum over the span is at an end.
  const double y0 = camera_.y + (target_point.y - camera_.y) * t0;
  const double y1 = camera_.y + (target_point.y - camera_.y) * t1;
  return std::min(y0, y1) <= prism.height;
}

bool OcclusionQuery::occluded(Point3 target_point) const {
  std::size_t hint = 0;
  return occluded(target_point, hint);
}

bool OcclusionQuery::occluded(Point3 target_point, std::size_t& hint) const {
  const Box2 seg{{std::min(camera_.x, target_point.x), std::min(camera_.z, target_point.z)},
                 {std::max(camera_.x, target_point.x), std::max(camera_.z, target_point.z)}};
  if (hint < prisms_.size() && blocks(prisms_[hint], target_point, seg)) return true;
  for (std::size_t i = 0; i < prisms_.size(); ++i) {
    if (i != hint && blocks(prisms_[i], target_point, seg)) {
      hint = i;
      return true;
    }
  }
  return false;
}

bool ray_occluded_3d(Point3 camera, Point3 target_point, std::span<const Prism> prisms) {
  const Point2 a{camera.x, camera.z}, b{target_point.x, target_point.z};
  const Box2 seg{{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
  for (const auto& prism : prisms) {
    if (prism.height <= 0.0) continue;
    if (!seg.overlaps(prism.footprint.bounds())) continue;
    const auto span = clip_segment(a, b, prism.footprint);
    if (!span) continue;
    const double y0 = camera.y + (target_point.y - camera.y) * (*span)[0];
    const double y1 = camera.y + (target_point.y - camera.y) * (*span)[1];
    if (std::min(y0, y1) <= prism.height) return true;
  }
  return false;
}

double translation_contact(const ConvexPolygon& moving, const ConvexPolygon& obstacle, Point2 dir) {
  // Translations that overlap form obstacle (+) (-moving); walk the ray into it.
  constexpr double kReach = 100.0;
  const Box2 bo = obstacle.bounds(), bm = moving.bounds();
  const Box2 hull_box{bo.lo - bm.hi, bo.hi - bm.lo};
  double t0 = 0.0, t1 = kReach;
  for (auto [o, lo, hi] : {std::tuple{dir.x, hull_box.lo.x, hull_box.hi.x}, std::tuple{dir.y, hull_box.lo.y, hull_box.hi.y}}) {
    if (o == 0.0) {
      if (lo > kGeomTol || hi < -kGeomTol) return kInf;
      continue;
    }
    double a = lo / o, b = hi / o;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a - kGeomTol);
    t1 = std::min(t1, b + kGeomTol);
  }
  if (t0 > t1) return kInf;
  const ConvexPolygon cspace = minkowski_sum_convex(obstacle, moving.reflected());
  if (cspace.degenerate()) return kInf;
  const auto span = clip_segment({0.0, 0.0}, dir * kReach, cspace);
  if (!span) return kInf;
  return (*span)[0] * kReach;
}

ConvexPolygon swept(const ConvexPolygon& p, Point2 d) {
  std::vector<Point2> pts(p.vertices());
  for (const auto& v : p.vertices()) pts.push_back(v + d);
  return convex_hull(pts);
}

}  // namespace shelf

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace shelf {

/// Orientation/incidence tolerance in meters. Scenes are ~1 m across.
inline constexpr double kGeomTol = 1e-9;

// Planar points live in the shelf floor plane: x lateral, y = shelf z (depth).
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(Point3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend bool operator==(Point3 a, Point3 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

/// Signed distance of c from the directed line a->b (positive on the left).
/// Degenerate a == b falls back to the distance |c - a| with sign 0.
double orient_dist(Point2 a, Point2 b, Point2 c);

struct Box2 {
  Point2 lo;
  Point2 hi;

  bool overlaps(const Box2& o, double pad = 0.0) const {
    return lo.x < o.hi.x + pad && o.lo.x < hi.x + pad && lo.y < o.hi.y + pad &&
           o.lo.y < hi.y + pad;
  }
};

/// Convex polygon, CCW, collinear vertices eliminated. One or two vertices
/// encode a degenerate (point or segment) hull.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Trusts the caller: `ccw_vertices` must already be strictly convex and CCW.
  explicit ConvexPolygon(std::vector<Point2> ccw_vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  bool degenerate() const { return vertices_.size() < 3; }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

  double area() const;
  Box2 bounds() const { return bounds_; }
  Point2 centroid() const;

  /// Closed containment, boundary widened by `tol`.
  bool contains(Point2 p, double tol = kGeomTol) const;
  /// Strict interior containment, at least `tol` away from every edge.
  bool contains_interior(Point2 p, double tol = kGeomTol) const;

  ConvexPolygon translated(Point2 d) const;
  ConvexPolygon reflected() const;

  friend bool operator==(const ConvexPolygon& a, const ConvexPolygon& b) {
    return a.vertices_ == b.vertices_;
  }

 private:
  std::vector<Point2> vertices_;
  Box2 bounds_{};
};

/// Star-shaped or general simple polygon, CCW.
struct SimplePolygon {
  std::vector<Point2> vertices;

  double area() const;
  /// Closed containment with boundary tolerance.
  bool contains(Point2 p, double tol = kGeomTol) const;
};

struct Prism {
  ConvexPolygon footprint;
  double height = 0.0;
};

/// Axis-aligned rectangle [x0,x1] x [y0,y1] as a CCW polygon.
ConvexPolygon make_rect(double x0, double y0, double x1, double y1);

ConvexPolygon convex_hull(std::span<const Point2> points);

/// {a + b : a in p, b in q}. Vertex count <= |p| + |q|.
ConvexPolygon minkowski_sum_convex(const ConvexPolygon& p, const ConvexPolygon& q);

/// Region of `boundary` seen from `viewpoint` past convex `obstacles`.
/// Computed by an angular sweep over every boundary/obstacle vertex; each event
/// ray is resolved exactly against all edges. When the viewpoint lies on the
/// boundary it is emitted as the first vertex of the result.
/// Throws ViewpointInsideObstacle.
SimplePolygon visibility_polygon(Point2 viewpoint, const ConvexPolygon& boundary,
                                 std::span<const ConvexPolygon> obstacles);

/// Triangles (viewpoint, v_i, v_i+1) covering a polygon star-shaped about
/// `viewpoint`. Zero-area slivers are dropped.
std::vector<ConvexPolygon> fan_triangles(const SimplePolygon& star, Point2 viewpoint);

/// Euclidean distance between two convex sets (0 if they touch or overlap).
double polygon_distance(const ConvexPolygon& p, const ConvexPolygon& q);

/// True iff dist(p, q) < clearance; clearance 0 tests for interior overlap
/// deeper than kGeomTol.
bool polygons_intersect(const ConvexPolygon& p, const ConvexPolygon& q, double clearance = 0.0);

/// True iff the open segment (a, b) passes through the interior of `poly`.
bool segment_crosses_interior(Point2 a, Point2 b, const ConvexPolygon& poly);

/// Parameter interval [t0, t1] of segment a + t (b - a), t in [0,1], lying
/// inside `poly`; nullopt when the overlap is shorter than kGeomTol.
std::optional<std::array<double, 2>> clip_segment(Point2 a, Point2 b, const ConvexPolygon& poly);

/// Is the point hidden from the camera by any vertical prism standing on y = 0?
bool ray_occluded_3d(Point3 camera, Point3 target_point, std::span<const Prism> prisms);

/// ray_occluded_3d for many target points and one camera: the camera-side
/// edge tests are done once. Same arithmetic, so results are identical.
class OcclusionQuery {
 public:
  OcclusionQuery(Point3 camera, std::span<const Prism> prisms);
  bool occluded(Point3 target_point) const;
  /// Tries prism `hint` first and leaves the occluding prism's index in it.
  bool occluded(Point3 target_point, std::size_t& hint) const;

 private:
  struct Edge {
    Point2 origin;
    Point2 normal;
    double f0;  // camera's signed depth past the eroded edge
  };
  struct Entry {
    Box2 bounds;
    double height;
    std::size_t first, last;
  };
  Point3 camera_;
  std::vector<Entry> prisms_;
  std::vector<Edge> edges_;

  bool blocks(const Entry& prism, Point3 target_point, const Box2& seg) const;
};

/// Largest s >= 0 such that `moving` translated by s * dir (unit) does not
/// overlap `obstacle`'s interior; +inf if the sweep never reaches it.
double translation_contact(const ConvexPolygon& moving, const ConvexPolygon& obstacle, Point2 dir);

/// Convex hull of `p` and `p` translated by `d` (the swept area of a straight move).
ConvexPolygon swept(const ConvexPolygon& p, Point2 d);

}  // namespace shelf

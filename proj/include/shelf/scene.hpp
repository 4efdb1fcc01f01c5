#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shelf/geom2d.hpp"

namespace shelf {

struct ShelfConfig {
  double width = 0.60;
  double height = 0.60;
  double depth = 0.60;
  bool left_wall = true;
  bool right_wall = true;
  bool back_wall = true;
  bool floor = true;

  ConvexPolygon floor_rect() const { return make_rect(0.0, 0.0, width, depth); }
  friend bool operator==(const ShelfConfig&, const ShelfConfig&) = default;
};

/// Pinhole camera looking along +z. Image rows grow downward.
struct CameraModel {
  Point3 position;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int image_width = 256;
  int image_height = 192;

  /// Camera at (w/2, 0.8 h, -0.5) with the largest square-pixel focal length
  /// that keeps the whole shelf opening inside the image.
  static CameraModel default_for(const ShelfConfig& shelf, int image_width = 256, int image_height = 192);

  /// Continuous pixel coordinates (u, v); nullopt behind the camera.
  std::optional<Point2> project(Point3 p) const;
  /// Unnormalized ray direction through continuous pixel (u, v).
  Point3 ray_direction(double u, double v) const;
  Point2 floor_point() const { return {position.x, position.z}; }

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

enum class ShapeKind { Cuboid, Cylinder };

struct ObjectShape {
  ShapeKind kind = ShapeKind::Cuboid;
  // Cuboid: extents along local x, local z and height. Cylinder: radius and height.
  double width = 0.0;
  double depth = 0.0;
  double height = 0.0;
  double radius = 0.0;

  static ObjectShape cuboid(double w, double d, double h) { return {ShapeKind::Cuboid, w, d, h, 0.0}; }
  static ObjectShape cylinder(double r, double h) { return {ShapeKind::Cylinder, 0.0, 0.0, h, r}; }

  friend bool operator==(const ObjectShape&, const ObjectShape&) = default;
};

struct Pose {
  double x = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

inline constexpr int kDefaultCylinderSides = 32;

ConvexPolygon footprint_of(const ObjectShape& shape, const Pose& pose,
                           int cylinder_sides = kDefaultCylinderSides);

struct ObjectInstance {
  int id = 0;
  ObjectShape shape;
  Pose pose;
  ConvexPolygon footprint;
  Prism prism;

  static ObjectInstance make(int id, const ObjectShape& shape, const Pose& pose);
  ObjectInstance moved_to(const Pose& p) const { return make(id, shape, p); }

  friend bool operator==(const ObjectInstance& a, const ObjectInstance& b) {
    return a.id == b.id && a.shape == b.shape && a.pose == b.pose;
  }
};

enum class AspectRatio { Thin, Cube, Tall };

const char* aspect_name(AspectRatio a);

/// Target cuboid; sample points are in the local frame, origin at base center.
struct TargetSpec {
  double width = 0.06;
  double depth = 0.06;
  double height = 0.06;
  AspectRatio aspect = AspectRatio::Cube;
  std::vector<Point3> sample_points;

  /// 0.06 x 0.06 x {0.03, 0.06, 0.12} m with corners, edge midpoints and face
  /// centers as the 26 sample points.
  static TargetSpec make(AspectRatio a);
  static TargetSpec with_dims(double w, double d, double h);

  /// Sample points lying on the base (y == 0), local frame.
  std::vector<Point2> base_points() const;
  ConvexPolygon footprint_at(Point2 center) const;

  friend bool operator==(const TargetSpec& a, const TargetSpec& b) {
    return a.width == b.width && a.depth == b.depth && a.height == b.height;
  }
};

struct PlacedTarget {
  TargetSpec spec;
  double x = 0.0;
  double z = 0.0;

  ConvexPolygon footprint() const { return spec.footprint_at({x, z}); }
  Prism prism() const { return {footprint(), spec.height}; }
  std::vector<Point3> world_points() const;

  friend bool operator==(const PlacedTarget&, const PlacedTarget&) = default;
};

struct Scene {
  ShelfConfig shelf;
  CameraModel camera;
  std::vector<ObjectInstance> objects;
  std::optional<PlacedTarget> target;
  std::uint64_t seed = 0;

  std::vector<Prism> occluder_prisms() const;
  std::vector<ConvexPolygon> occluder_footprints() const;
  /// Index into `objects`, or -1.
  int index_of(int object_id) const;
  Scene without_target() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Empty when the scene is valid; otherwise one message per violation.
std::vector<std::string> scene_violations(const Scene& scene);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

}  // namespace shelf

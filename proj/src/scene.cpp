#include "shelf/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "shelf/errors.hpp"

namespace shelf {

namespace {

// cos/sin with exact values at multiples of pi/2, so axis-aligned footprints stay exact.
double snap_unit(double v) {
  if (std::abs(v) < 1e-12) return 0.0;
  if (std::abs(v - 1.0) < 1e-12) return 1.0;
  if (std::abs(v + 1.0) < 1e-12) return -1.0;
  return v;
}

}  // namespace

CameraModel CameraModel::default_for(const ShelfConfig& shelf, int image_width, int image_height) {
  CameraModel cam;
  cam.position = {shelf.width / 2.0, 0.8 * shelf.height, -0.5};
  cam.image_width = image_width;
  cam.image_height = image_height;
  const double dist = -cam.position.z;
  // Opening spans [0,w] x [0,h] at z = 0.
  const double half_w = std::max(cam.position.x, shelf.width - cam.position.x);
  const double f_h = (image_width / 2.0) * dist / half_w;
  const double f_v = image_height * dist / shelf.height;
  const double f = std::min(f_h, f_v);
  cam.fx = f;
  cam.fy = f;
  cam.cx = image_width / 2.0;
  // Top edge of the opening lands on row 0.
  cam.cy = f * (shelf.height - cam.position.y) / dist;
  return cam;
}

std::optional<Point2> CameraModel::project(Point3 p) const {
  const Point3 r = p - position;
  if (r.z <= 0.0) return std::nullopt;
  return Point2{cx + fx * r.x / r.z, cy - fy * r.y / r.z};
}

Point3 CameraModel::ray_direction(double u, double v) const {
  return {(u - cx) / fx, -(v - cy) / fy, 1.0};
}

ConvexPolygon footprint_of(const ObjectShape& shape, const Pose& pose, int cylinder_sides) {
  std::vector<Point2> pts;
  if (shape.kind == ShapeKind::Cuboid) {
    const double c = snap_unit(std::cos(pose.yaw)), s = snap_unit(std::sin(pose.yaw));
    const double hw = shape.width / 2.0, hd = shape.depth / 2.0;
    for (const auto& local : {Point2{-hw, -hd}, Point2{hw, -hd}, Point2{hw, hd}, Point2{-hw, hd}}) {
      pts.push_back({pose.x + c * local.x - s * local.y, pose.z + s * local.x + c * local.y});
    }
  } else {
    const int k = std::max(cylinder_sides, 3);
    if (k == 32 && pose.yaw == 0.0) {
      static const auto unit = [] {
        std::array<Point2, 32> u{};
        for (int i = 0; i < 32; ++i) {
          const double a = 2.0 * std::numbers::pi * i / 32;
          u[i] = {std::cos(a), std::sin(a)};
        }
        return u;
      }();
      for (const Point2& u : unit) pts.push_back({pose.x + shape.radius * u.x, pose.z + shape.radius * u.y});
      return convex_hull(pts);
    }
    for (int i = 0; i < k; ++i) {
      const double a = 2.0 * std::numbers::pi * i / k + pose.yaw;
      pts.push_back({pose.x + shape.radius * std::cos(a), pose.z + shape.radius * std::sin(a)});
    }
  }
  return convex_hull(pts);
}

ObjectInstance ObjectInstance::make(int id, const ObjectShape& shape, const Pose& pose) {
  ObjectInstance o;
  o.id = id;
  o.shape = shape;
  o.pose = pose;
  o.footprint = footprint_of(shape, pose);
  o.prism = {o.footprint, shape.height};
  return o;
}

const char* aspect_name(AspectRatio a) {
  switch (a) {
    case AspectRatio::Thin: return "thin";
    case AspectRatio::Cube: return "cube";
    case AspectRatio::Tall: return "tall";
  }
  return "cube";
}

TargetSpec TargetSpec::with_dims(double w, double d, double h) {
  TargetSpec t;
  t.width = w;
  t.depth = d;
  t.height = h;
  t.aspect = h < 0.045 ? AspectRatio::Thin : (h > 0.09 ? AspectRatio::Tall : AspectRatio::Cube);
  // 3x3x3 lattice over the box minus its center: 8 corners, 12 edge midpoints, 6 face centers.
  for (int iy = 0; iy < 3; ++iy) {
    for (int iz = 0; iz < 3; ++iz) {
      for (int ix = 0; ix < 3; ++ix) {
        if (ix == 1 && iy == 1 && iz == 1) continue;
        t.sample_points.push_back({(ix - 1) * w / 2.0, iy * h / 2.0, (iz - 1) * d / 2.0});
      }
    }
  }
  return t;
}

TargetSpec TargetSpec::make(AspectRatio a) {
  switch (a) {
    case AspectRatio::Thin: return with_dims(0.06, 0.06, 0.03);
    case AspectRatio::Tall: return with_dims(0.06, 0.06, 0.12);
    case AspectRatio::Cube: break;
  }
  return with_dims(0.06, 0.06, 0.06);
}

std::vector<Point2> TargetSpec::base_points() const {
  std::vector<Point2> out;
  for (const auto& p : sample_points)
    if (p.y == 0.0) out.push_back({p.x, p.z});
  return out;
}

ConvexPolygon TargetSpec::footprint_at(Point2 c) const {
  return make_rect(c.x - width / 2.0, c.y - depth / 2.0, c.x + width / 2.0, c.y + depth / 2.0);
}

std::vector<Point3> PlacedTarget::world_points() const {
  std::vector<Point3> out;
  out.reserve(spec.sample_points.size());
  for (const auto& p : spec.sample_points) out.push_back({x + p.x, p.y, z + p.z});
  return out;
}

std::vector<Prism> Scene::occluder_prisms() const {
  std::vector<Prism> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back(o.prism);
  return out;
}

std::vector<ConvexPolygon> Scene::occluder_footprints() const {
  std::vector<ConvexPolygon> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back(o.footprint);
  return out;
}

int Scene::index_of(int object_id) const {
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i].id == object_id) return static_cast<int>(i);
  return -1;
}

Scene Scene::without_target() const {
  Scene s = *this;
  s.target.reset();
  return s;
}

std::vector<std::string> scene_violations(const Scene& scene) {
  std::vector<std::string> out;
  const ConvexPolygon floor = scene.shelf.floor_rect();
  std::vector<std::pair<std::string, ConvexPolygon>> parts;
  for (const auto& o : scene.objects) parts.emplace_back("object " + std::to_string(o.id), o.footprint);
  if (scene.target) parts.emplace_back("target", scene.target->footprint());
  for (const auto& [name, fp] : parts) {
    for (const auto& v : fp.vertices()) {
      if (!floor.contains(v, 1e-7)) {
        out.push_back(name + " out of bounds");
        break;
      }
    }
  }
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (polygons_intersect(parts[i].second, parts[j].second, 0.0))
        out.push_back(parts[i].first + " overlaps " + parts[j].first);
  return out;
}

std::string scene_to_json(const Scene& scene) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["shelf"] = {{"w", scene.shelf.width}, {"h", scene.shelf.height}, {"d", scene.shelf.depth}};
  const auto& c = scene.camera;
  j["camera"] = {{"pos", {c.position.x, c.position.y, c.position.z}},
                 {"fx", c.fx},
                 {"fy", c.fy},
                 {"cx", c.cx},
                 {"cy", c.cy},
                 {"img_w", c.image_width},
                 {"img_h", c.image_height}};
  ordered_json objs = ordered_json::array();
  for (const auto& o : scene.objects) {
    ordered_json e;
    e["id"] = o.id;
    if (o.shape.kind == ShapeKind::Cuboid) {
      e["kind"] = "cuboid";
      e["dims"] = {o.shape.width, o.shape.depth, o.shape.height};
    } else {
      e["kind"] = "cylinder";
      e["dims"] = {o.shape.radius, o.shape.height};
    }
    e["x"] = o.pose.x;
    e["z"] = o.pose.z;
    e["yaw"] = o.pose.yaw;
    objs.push_back(std::move(e));
  }
  j["objects"] = std::move(objs);
  if (scene.target) {
    const auto& t = *scene.target;
    j["target"] = {{"dims", {t.spec.width, t.spec.depth, t.spec.height}}, {"x", t.x}, {"z", t.z}};
  }
  j["seed"] = scene.seed;
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    Scene s;
    s.shelf.width = j.at("shelf").at("w").get<double>();
    s.shelf.height = j.at("shelf").at("h").get<double>();
    s.shelf.depth = j.at("shelf").at("d").get<double>();
    const auto& c = j.at("camera");
    const auto& pos = c.at("pos");
    s.camera.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
    s.camera.fx = c.at("fx").get<double>();
    s.camera.fy = c.at("fy").get<double>();
    s.camera.cx = c.at("cx").get<double>();
    s.camera.cy = c.at("cy").get<double>();
    s.camera.image_width = c.at("img_w").get<int>();
    s.camera.image_height = c.at("img_h").get<int>();
    for (const auto& e : j.at("objects")) {
      const auto kind = e.at("kind").get<std::string>();
      const auto& dims = e.at("dims");
      ObjectShape shape;
      if (kind == "cuboid") {
        shape = ObjectShape::cuboid(dims.at(0).get<double>(), dims.at(1).get<double>(), dims.at(2).get<double>());
      } else if (kind == "cylinder") {
        shape = ObjectShape::cylinder(dims.at(0).get<double>(), dims.at(1).get<double>());
      } else {
        throw ShelfError("unknown object kind: " + kind);
      }
      const Pose pose{e.at("x").get<double>(), e.at("z").get<double>(), e.at("yaw").get<double>()};
      s.objects.push_back(ObjectInstance::make(e.at("id").get<int>(), shape, pose));
    }
    if (j.contains("target") && !j["target"].is_null()) {
      const auto& t = j["target"];
      const auto& dims = t.at("dims");
      PlacedTarget placed;
      placed.spec = TargetSpec::with_dims(dims.at(0).get<double>(), dims.at(1).get<double>(), dims.at(2).get<double>());
      placed.x = t.at("x").get<double>();
      placed.z = t.at("z").get<double>();
      s.target = std::move(placed);
    }
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ShelfError(std::string("scene parse error: ") + e.what());
  }
}

}  // namespace shelf

#include "shelf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "shelf/errors.hpp"

namespace shelf {

namespace {

constexpr double kMinPush = 1e-6;

// Everything an object must not run into: the other occluders and the target.
std::vector<ConvexPolygon> obstacles_for(const Scene& scene, int index) {
  std::vector<ConvexPolygon> out;
  out.reserve(scene.objects.size());
  for (int i = 0; i < static_cast<int>(scene.objects.size()); ++i)
    if (i != index) out.push_back(scene.objects[i].footprint);
  if (scene.target) out.push_back(scene.target->footprint());
  return out;
}

bool hits_any(const ConvexPolygon& p, const std::vector<ConvexPolygon>& obstacles, double clearance = 0.0) {
  for (const auto& o : obstacles)
    if (polygons_intersect(p, o, clearance)) return true;
  return false;
}

bool inside_floor(const Box2& b, const ShelfConfig& shelf) {
  return b.lo.x >= -kGeomTol && b.hi.x <= shelf.width + kGeomTol && b.lo.y >= -kGeomTol &&
         b.hi.y <= shelf.depth + kGeomTol;
}

struct BladeGeometry {
  ConvexPolygon slab;
  ConvexPolygon corridor;
  ConvexPolygon body;  // object plus blade, moved together
  Point3 q;
};

BladeGeometry blade_geometry(const Scene& scene, const ObjectInstance& obj, int sign, const BluctionToolSpec& tool) {
  const Box2 b = obj.footprint.bounds();
  const double half_w = tool.blade_width / 2.0;
  const double zc = std::min((b.lo.y + b.hi.y) / 2.0, scene.shelf.depth - half_w);
  const double x0 = sign > 0 ? b.lo.x - tool.blade_thickness : b.hi.x;
  const double x1 = x0 + tool.blade_thickness;
  BladeGeometry g;
  g.slab = make_rect(x0, zc - half_w, x1, zc + half_w);
  g.corridor = make_rect(x0, std::min(0.0, zc - half_w), x1, zc + half_w);
  std::vector<Point2> pts(obj.footprint.vertices());
  pts.insert(pts.end(), g.slab.vertices().begin(), g.slab.vertices().end());
  g.body = convex_hull(pts);
  g.q = {(x0 + x1) / 2.0, tool.blade_height / 2.0, zc};
  return g;
}

}  // namespace

int action_object(const Action& a) {
  return std::visit([](const auto& x) { return x.object_id; }, a);
}

std::string describe(const Action& a) {
  char buf[96];
  if (const auto* p = std::get_if<PushAction>(&a)) {
    std::snprintf(buf, sizeof buf, "push(obj=%d, d=%+.4f)", p->object_id, p->d);
  } else {
    const auto& s = std::get<SuctionAction>(a);
    std::snprintf(buf, sizeof buf, "suction(obj=%d, x=%.4f, z=%.4f)", s.object_id, s.x, s.z);
  }
  return buf;
}

std::optional<double> max_push(const Scene& scene, int index, int sign, const SimConfig& cfg) {
  const auto& obj = scene.objects[index];
  const auto g = blade_geometry(scene, obj, sign, cfg.tool);
  const Box2 sb = g.slab.bounds();
  if (sb.lo.x < -kGeomTol || sb.hi.x > scene.shelf.width + kGeomTol) return std::nullopt;
  const auto obstacles = obstacles_for(scene, index);
  if (hits_any(g.slab, obstacles) || hits_any(g.corridor, obstacles)) return std::nullopt;

  const Box2 body = g.body.bounds();
  double reach = sign > 0 ? scene.shelf.width - body.hi.x : body.lo.x;
  const Point2 dir{static_cast<double>(sign), 0.0};
  for (const auto& o : obstacles) reach = std::min(reach, translation_contact(g.body, o, dir));
  const double d = reach - cfg.clearance;
  if (d <= kMinPush) return std::nullopt;
  return d;
}

std::vector<PushAction> feasible_pushes(const Scene& scene, const SimConfig& cfg) {
  std::vector<PushAction> out;
  for (int i = 0; i < static_cast<int>(scene.objects.size()); ++i) {
    for (int sign : {+1, -1}) {
      const auto dmax = max_push(scene, i, sign, cfg);
      if (!dmax) continue;
      const Point3 q = blade_geometry(scene, scene.objects[i], sign, cfg.tool).q;
      for (int k = 1; k * cfg.push_step < *dmax - 1e-9; ++k)
        out.push_back({scene.objects[i].id, q, sign * k * cfg.push_step});
      out.push_back({scene.objects[i].id, q, sign * *dmax});
    }
  }
  return out;
}

bool suction_grasp_feasible(const Scene& scene, int index, const SimConfig& cfg) {
  const auto& obj = scene.objects[index];
  const Box2 b = obj.footprint.bounds();
  const double face_z = b.lo.y;
  if (face_z > cfg.tool.tube_length) return false;
  if (face_z <= kGeomTol) return true;
  const double xc = obj.pose.x;
  const double r = cfg.tool.suction_cup_diameter / 2.0;
  const ConvexPolygon corridor = make_rect(xc - r, 0.0, xc + r, face_z);
  return !hits_any(corridor, obstacles_for(scene, index));
}

namespace {

// Suction feasibility with the per-object and per-column pieces cached.
class SuctionPlanner {
 public:
  SuctionPlanner(const Scene& scene, int index, const SimConfig& cfg)
      : scene_(scene), cfg_(cfg), obj_(scene.objects[index]), obstacles_(obstacles_for(scene, index)) {
    grasp_ok_ = suction_grasp_feasible(scene, index, cfg);
    if (!grasp_ok_) return;
    pull_ = std::max(0.0, obj_.footprint.bounds().hi.y - cfg.front_plane_z);
    pull_sweep_ = swept(obj_.footprint, {0.0, -pull_});
    pull_ok_ = !hits_any(pull_sweep_, obstacles_);
    transport_ = obj_.footprint.translated({0.0, -pull_});
  }

  bool reachable() const { return grasp_ok_ && pull_ok_; }

  std::optional<ConvexPolygon> lateral(double x) {
    auto it = lateral_cache_.find(x);
    if (it == lateral_cache_.end()) {
      ConvexPolygon sweep = swept(transport_, {x - obj_.pose.x, 0.0});
      const Box2 b = sweep.bounds();
      const bool ok = b.lo.x >= -kGeomTol && b.hi.x <= scene_.shelf.width + kGeomTol && !hits_any(sweep, obstacles_);
      it = lateral_cache_.emplace(x, ok ? std::optional<ConvexPolygon>(std::move(sweep)) : std::nullopt).first;
    }
    return it->second;
  }

  std::optional<std::vector<ConvexPolygon>> path(double x, double z) {
    if (!reachable()) return std::nullopt;
    const ConvexPolygon final_fp = obj_.footprint.translated({x - obj_.pose.x, z - obj_.pose.z});
    if (!inside_floor(final_fp.bounds(), scene_.shelf)) return std::nullopt;
    if (hits_any(final_fp, obstacles_, cfg_.clearance)) return std::nullopt;
    const auto lat = lateral(x);
    if (!lat) return std::nullopt;
    const ConvexPolygon at_front = transport_.translated({x - obj_.pose.x, 0.0});
    const ConvexPolygon push_in = swept(at_front, {0.0, z - (obj_.pose.z - pull_)});
    if (hits_any(push_in, obstacles_)) return std::nullopt;
    return std::vector<ConvexPolygon>{pull_sweep_, *lat, push_in};
  }

 private:
  const Scene& scene_;
  const SimConfig& cfg_;
  const ObjectInstance& obj_;
  std::vector<ConvexPolygon> obstacles_;
  bool grasp_ok_ = false;
  bool pull_ok_ = false;
  double pull_ = 0.0;
  ConvexPolygon pull_sweep_;
  ConvexPolygon transport_;
  std::map<double, std::optional<ConvexPolygon>> lateral_cache_;
};

}  // namespace

bool suction_reachable(const Scene& scene, int object_index, const SimConfig& cfg) {
  return SuctionPlanner(scene, object_index, cfg).reachable();
}

std::optional<std::vector<ConvexPolygon>> suction_path(const Scene& scene, const SuctionAction& a,
                                                       const SimConfig& cfg) {
  const int index = scene.index_of(a.object_id);
  if (index < 0) return std::nullopt;
  SuctionPlanner planner(scene, index, cfg);
  return planner.path(a.x, a.z);
}

std::vector<Point2> suction_grid(const Scene& scene, int index, const SimConfig& cfg, bool include_current) {
  std::vector<Point2> out;
  const double step = cfg.place_step;
  const auto& obj = scene.objects[index];
  const Box2 local = footprint_of(obj.shape, {0.0, 0.0, obj.pose.yaw}).bounds();
  for (int kx = 1; kx * step + local.hi.x <= scene.shelf.width + kGeomTol; ++kx) {
    const double x = kx * step;
    if (x + local.lo.x < -kGeomTol) continue;
    for (int kz = 1; kz * step + local.hi.y <= scene.shelf.depth + kGeomTol; ++kz) {
      const double z = kz * step;
      if (z + local.lo.y < -kGeomTol) continue;
      if (!include_current && std::abs(x - obj.pose.x) <= 1e-9 && std::abs(z - obj.pose.z) <= 1e-9) continue;
      out.push_back({x, z});
    }
  }
  return out;
}

std::vector<SuctionAction> feasible_suction_subset(const Scene& scene, int index, const std::vector<Point2>& candidates,
                                                   std::size_t limit, const SimConfig& cfg) {
  std::vector<SuctionAction> out;
  SuctionPlanner planner(scene, index, cfg);
  if (!planner.reachable()) return out;
  for (const Point2& c : candidates) {
    if (out.size() >= limit) break;
    if (planner.path(c.x, c.y)) out.push_back({scene.objects[index].id, c.x, c.y});
  }
  return out;
}

std::vector<std::vector<SuctionAction>> feasible_suction_subsets(const Scene& scene, int index,
                                                                const std::vector<CandidateList>& lists,
                                                                const SimConfig& cfg) {
  std::vector<std::vector<SuctionAction>> out(lists.size());
  SuctionPlanner planner(scene, index, cfg);
  if (!planner.reachable()) return out;
  const int id = scene.objects[index].id;
  std::map<std::pair<double, double>, bool> memo;
  for (std::size_t l = 0; l < lists.size(); ++l) {
    for (const Point2& c : lists[l].candidates) {
      if (out[l].size() >= lists[l].limit) break;
      auto [it, fresh] = memo.try_emplace({c.x, c.y}, false);
      if (fresh) it->second = planner.path(c.x, c.y).has_value();
      if (it->second) out[l].push_back({id, c.x, c.y});
    }
  }
  return out;
}

std::vector<SuctionAction> feasible_suctions(const Scene& scene, const SimConfig& cfg) {
  std::vector<SuctionAction> out;
  for (int i = 0; i < static_cast<int>(scene.objects.size()); ++i) {
    SuctionPlanner planner(scene, i, cfg);
    if (!planner.reachable()) continue;
    for (const Point2& c : suction_grid(scene, i, cfg))
      if (planner.path(c.x, c.y)) out.push_back({scene.objects[i].id, c.x, c.y});
  }
  return out;
}

ActionOutcome apply_action(const Scene& scene, const Action& a, const SimConfig& cfg) {
  const int index = scene.index_of(action_object(a));
  if (index < 0) throw InfeasibleAction("unknown object in " + describe(a));
  ActionOutcome out{scene, scene.objects[index].pose, {}};
  const auto& obj = scene.objects[index];

  if (const auto* push = std::get_if<PushAction>(&a)) {
    if (std::abs(push->d) <= kMinPush) throw InfeasibleAction("zero-length " + describe(a));
    const int sign = push->d > 0 ? 1 : -1;
    const auto dmax = max_push(scene, index, sign, cfg);
    if (!dmax || std::abs(push->d) > *dmax + 1e-9) throw InfeasibleAction("blocked " + describe(a));
    out.new_pose = {obj.pose.x + push->d, obj.pose.z, obj.pose.yaw};
    out.swept.push_back(swept(obj.footprint, {push->d, 0.0}));
  } else {
    const auto& s = std::get<SuctionAction>(a);
    auto path = suction_path(scene, s, cfg);
    if (!path) throw InfeasibleAction("blocked " + describe(a));
    out.new_pose = {s.x, s.z, obj.pose.yaw};
    out.swept = std::move(*path);
  }
  out.scene.objects[index] = obj.moved_to(out.new_pose);
  return out;
}

}  // namespace shelf

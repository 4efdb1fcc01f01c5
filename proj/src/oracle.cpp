#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>

#include "shelf/errors.hpp"
#include "shelf/policies.hpp"

namespace shelf {

ConvexPolygon visibility_triangle(const Scene& scene) {
  if (!scene.target) throw ShelfError("visibility triangle needs a target");
  const auto& t = *scene.target;
  const double zf = t.z - t.spec.depth / 2.0;
  const std::vector<Point2> pts{scene.camera.floor_point(), {t.x - t.spec.width / 2.0, zf}, {t.x + t.spec.width / 2.0, zf}};
  return convex_hull(pts);
}

std::vector<int> triangle_blockers(const Scene& scene) {
  const ConvexPolygon tri = visibility_triangle(scene);
  std::vector<int> out;
  for (const auto& o : scene.objects)
    if (polygons_intersect(o.footprint, tri)) out.push_back(o.id);
  return out;
}

namespace {

struct Node {
  std::vector<Pose> poses;
  double g = 0.0;
  int n_actions = 0;
  int n_suction = 0;
  int parent = -1;
  Action action;
};

struct Entry {
  long long f;  // f in 1e-9 units so equal-cost paths tie exactly
  double h;
  int n_actions;
  int n_suction;
  int index;
};

struct EntryAfter {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    if (a.n_actions != b.n_actions) return a.n_actions > b.n_actions;
    if (a.n_suction != b.n_suction) return a.n_suction > b.n_suction;
    return a.index > b.index;
  }
};

long long quantize(double f) { return std::llround(f * 1e9); }

std::string pose_key(const std::vector<Pose>& poses) {
  std::string key;
  key.reserve(poses.size() * 16);
  for (const Pose& p : poses) {
    const long long q[2] = {std::llround(p.x * 1e6), std::llround(p.z * 1e6)};
    key.append(reinterpret_cast<const char*>(q), sizeof q);
  }
  return key;
}

Scene with_poses(const Scene& base, const std::vector<Pose>& poses) {
  Scene s = base;
  for (std::size_t i = 0; i < poses.size(); ++i)
    if (!(s.objects[i].pose == poses[i])) s.objects[i] = s.objects[i].moved_to(poses[i]);
  return s;
}

// Lower bound on the cost of clearing one blocker: a push when some x inside
// the walls takes it out of the triangle, a suction otherwise.
std::optional<double> blocker_bound(const ConvexPolygon& fp, const ConvexPolygon& tri, double width,
                                    ActionSet actions, const CostModel& cost) {
  if (!polygons_intersect(fp, tri)) return 0.0;
  const Box2 b = fp.bounds();
  if (!polygons_intersect(fp.translated({-b.lo.x, 0.0}), tri) ||
      !polygons_intersect(fp.translated({width - b.hi.x, 0.0}), tri))
    return cost.action_cost(false);
  if (actions == ActionSet::Push) return std::nullopt;
  return cost.action_cost(true);
}

// A blocker is stuck when no single action takes it out of the triangle even
// with every other blocker deleted. Feasibility only grows as obstacles go,
// so some action that clears no blocker must come first.
bool stuck(const Scene& s, int id, const std::vector<int>& blockers, const ConvexPolygon& tri, ActionSet actions,
           const SimConfig& sim) {
  Scene alone = s;
  std::erase_if(alone.objects, [&](const ObjectInstance& o) {
    return o.id != id && std::find(blockers.begin(), blockers.end(), o.id) != blockers.end();
  });
  const int k = alone.index_of(id);
  const auto& fp = alone.objects[k].footprint;
  for (int sign : {1, -1}) {
    const auto d = max_push(alone, k, sign, sim);
    if (d && !polygons_intersect(fp.translated({sign * *d, 0.0}), tri)) return false;
  }
  return actions == ActionSet::Push || !suction_reachable(alone, k, sim);
}

// Placement cells outside the triangle, fixed per object for the whole
// search since suctions keep yaw and the grid is shelf-aligned.
struct MenuCells {
  std::vector<Point2> outside;
  std::array<std::vector<Point2>, 4> by_corner;
  std::vector<Point2> origins;
};

std::vector<MenuCells> menu_cells(const Scene& root, const ConvexPolygon& tri, const SimConfig& sim) {
  std::vector<MenuCells> out(root.objects.size());
  const std::array<Point2, 4> corners{Point2{0.0, 0.0}, Point2{root.shelf.width, 0.0},
                                      Point2{0.0, root.shelf.depth}, Point2{root.shelf.width, root.shelf.depth}};
  for (std::size_t i = 0; i < root.objects.size(); ++i) {
    const auto& obj = root.objects[i];
    auto outside = [&](Point2 c) {
      return !polygons_intersect(obj.footprint.translated({c.x - obj.pose.x, c.y - obj.pose.z}), tri);
    };
    MenuCells& m = out[i];
    for (Point2 c : suction_grid(root, static_cast<int>(i), sim, true))
      if (outside(c)) m.outside.push_back(c);
    for (std::size_t k = 0; k < corners.size(); ++k) {
      m.by_corner[k] = m.outside;
      std::stable_sort(m.by_corner[k].begin(), m.by_corner[k].end(),
                       [&](Point2 a, Point2 b) { return norm(a - corners[k]) < norm(b - corners[k]); });
    }
    for (const auto& r : root.objects) {
      const Point2 c{r.pose.x, r.pose.z};
      if (r.id != obj.id && outside(c)) m.origins.push_back(c);
    }
  }
  return out;
}

// Bounded placement menu: nearest legal cells outside the triangle, the
// legal cell nearest each floor corner, and the root scene's object origins.
std::vector<SuctionAction> suction_menu(const Scene& scene, const std::vector<MenuCells>& cells,
                                        const SimConfig& sim) {
  std::vector<SuctionAction> out;
  auto add = [&](const std::vector<SuctionAction>& v) {
    for (const auto& a : v) {
      const bool dup = std::any_of(out.begin(), out.end(), [&](const SuctionAction& b) {
        return b.object_id == a.object_id && std::abs(b.x - a.x) < 1e-9 && std::abs(b.z - a.z) < 1e-9;
      });
      if (!dup) out.push_back(a);
    }
  };
  for (int i = 0; i < static_cast<int>(scene.objects.size()); ++i) {
    const Point2 here{scene.objects[i].pose.x, scene.objects[i].pose.z};
    auto away = [&](const std::vector<Point2>& v) {
      std::vector<Point2> r;
      r.reserve(v.size());
      for (Point2 c : v)
        if (std::abs(c.x - here.x) > 1e-9 || std::abs(c.y - here.y) > 1e-9) r.push_back(c);
      return r;
    };
    const MenuCells& m = cells[i];
    std::vector<CandidateList> lists;
    std::vector<Point2> near = away(m.outside);
    std::stable_sort(near.begin(), near.end(), [&](Point2 a, Point2 b) { return norm(a - here) < norm(b - here); });
    lists.push_back({std::move(near), 4});
    for (const auto& c : m.by_corner) lists.push_back({away(c), 1});
    std::vector<Point2> origins = away(m.origins);
    const std::size_t n_origins = origins.size();
    lists.push_back({std::move(origins), n_origins});
    for (const auto& v : feasible_suction_subsets(scene, i, lists, sim)) add(v);
  }
  return out;
}

}  // namespace

OracleResult oracle_search(const Scene& scene, ActionSet actions, int horizon, const CostModel& cost,
                           const SimConfig& sim, std::size_t node_budget) {
  OracleResult res;
  const ConvexPolygon tri = visibility_triangle(scene);
  auto h_of = [&](const Scene& s) -> std::optional<double> {
    double h = 0.0;
    for (const auto& o : s.objects) {
      const auto b = blocker_bound(o.footprint, tri, s.shelf.width, actions, cost);
      if (!b) return std::nullopt;
      h += *b;
    }
    if (h == 0.0) return h;
    const auto blockers = triangle_blockers(s);
    for (int id : blockers)
      if (stuck(s, id, blockers, tri, actions, sim)) return h + cost.action_cost(false);
    return h;
  };
  std::vector<MenuCells> cells;
  if (actions == ActionSet::PushSuction) cells = menu_cells(scene, tri, sim);

  std::vector<Node> nodes;
  std::priority_queue<Entry, std::vector<Entry>, EntryAfter> open;
  std::unordered_map<std::string, double> best_g;

  Node root;
  for (const auto& o : scene.objects) root.poses.push_back(o.pose);
  nodes.push_back(root);
  best_g[pose_key(root.poses)] = 0.0;
  const auto h0 = h_of(scene);
  if (!h0) return res;
  open.push({quantize(*h0), *h0, 0, 0, 0});

  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const Node cur = nodes[e.index];
    if (cur.g > best_g[pose_key(cur.poses)] + 1e-12) continue;
    const Scene s = with_poses(scene, cur.poses);
    if (*h_of(s) == 0.0) {
      res.solvable = true;
      res.weighted_cost = cur.g;
      res.n_suction = cur.n_suction;
      res.n_push = cur.n_actions - cur.n_suction;
      for (int i = e.index; nodes[i].parent >= 0; i = nodes[i].parent) res.actions.push_back(nodes[i].action);
      std::reverse(res.actions.begin(), res.actions.end());
      return res;
    }
    if (res.expanded >= node_budget) {
      res.budget_exhausted = true;
      break;
    }
    ++res.expanded;
    if (cur.n_actions >= horizon) continue;

    std::vector<Action> succ;
    for (const auto& p : feasible_pushes(s, sim)) succ.push_back(p);
    if (actions == ActionSet::PushSuction)
      for (const auto& a : suction_menu(s, cells, sim)) succ.push_back(a);

    for (const Action& a : succ) {
      const int idx = s.index_of(action_object(a));
      Node child;
      child.poses = cur.poses;
      if (const auto* p = std::get_if<PushAction>(&a)) {
        child.poses[idx].x += p->d;
      } else {
        const auto& k = std::get<SuctionAction>(a);
        child.poses[idx].x = k.x;
        child.poses[idx].z = k.z;
      }
      const bool suction = is_suction(a);
      child.g = cur.g + cost.action_cost(suction);
      child.n_actions = cur.n_actions + 1;
      child.n_suction = cur.n_suction + (suction ? 1 : 0);
      child.parent = e.index;
      child.action = a;
      const std::string key = pose_key(child.poses);
      auto it = best_g.find(key);
      if (it != best_g.end() && it->second <= child.g + 1e-12) continue;
      best_g[key] = child.g;
      const auto h = h_of(with_poses(scene, child.poses));
      if (!h) continue;
      nodes.push_back(std::move(child));
      const Node& n = nodes.back();
      open.push({quantize(n.g + *h), *h, n.n_actions, n.n_suction, static_cast<int>(nodes.size()) - 1});
    }
  }
  return res;
}

}  // namespace shelf

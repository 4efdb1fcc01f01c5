#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shelf/exec.hpp"
#include "shelf/scene.hpp"

namespace shelf {

/// Blade + suction tool geometry, meters.
struct BluctionToolSpec {
  double blade_width = 0.065;
  double blade_height = 0.075;
  double blade_thickness = 0.005;
  double suction_cup_diameter = 0.03;
  double tube_length = 0.40;
};

struct SimConfig {
  BluctionToolSpec tool;
  double clearance = 0.005;     // gap left before contact (pushes, placements)
  double push_step = 0.02;      // intermediate push stops
  double place_step = 0.04;     // suction placement grid
  double front_plane_z = 0.05;  // suctioned objects travel with their back face at or before this depth
};

struct PushAction {
  int object_id = 0;
  Point3 q;        // blade start, shelf frame
  double d = 0.0;  // signed travel along x

  friend bool operator==(const PushAction&, const PushAction&) = default;
};

/// Grasp from the front, then move so the object ends centered at (x, z).
struct SuctionAction {
  int object_id = 0;
  double x = 0.0;
  double z = 0.0;

  friend bool operator==(const SuctionAction&, const SuctionAction&) = default;
};

using Action = std::variant<PushAction, SuctionAction>;

inline bool is_suction(const Action& a) { return std::holds_alternative<SuctionAction>(a); }
int action_object(const Action& a);
std::string describe(const Action& a);

struct ActionOutcome {
  Scene scene;
  Pose new_pose;
  std::vector<ConvexPolygon> swept;
};

std::vector<PushAction> feasible_pushes(const Scene& scene, const SimConfig& cfg = {});

/// Maximal push distance for an object pushed in direction `sign` (+1 right,
/// -1 left); nullopt when the blade cannot be inserted or the object cannot move.
std::optional<double> max_push(const Scene& scene, int object_index, int sign, const SimConfig& cfg = {});

/// Front corridor for the cup is clear and the face is within tube reach.
bool suction_grasp_feasible(const Scene& scene, int object_index, const SimConfig& cfg = {});

/// Grasp is feasible and the pull to the front plane is collision-free, so
/// whether a suction succeeds depends only on its destination.
bool suction_reachable(const Scene& scene, int object_index, const SimConfig& cfg = {});

/// Swept footprints of the pull, lateral and push-in segments when the
/// suction is feasible; nullopt otherwise.
std::optional<std::vector<ConvexPolygon>> suction_path(const Scene& scene, const SuctionAction& a,
                                                       const SimConfig& cfg = {});

std::vector<SuctionAction> feasible_suctions(const Scene& scene, const SimConfig& cfg = {});

/// Placement-grid centers (multiples of place_step) that keep the object on
/// the floor, excluding its current position unless asked.
std::vector<Point2> suction_grid(const Scene& scene, int object_index, const SimConfig& cfg = {},
                                 bool include_current = false);

/// The first `limit` feasible placements among `candidates`, in order.
std::vector<SuctionAction> feasible_suction_subset(const Scene& scene, int object_index,
                                                   const std::vector<Point2>& candidates, std::size_t limit,
                                                   const SimConfig& cfg = {});

struct CandidateList {
  std::vector<Point2> candidates;
  std::size_t limit = 0;
};

/// feasible_suction_subset over several lists with one planner; placements
/// shared between lists are checked once.
std::vector<std::vector<SuctionAction>> feasible_suction_subsets(const Scene& scene, int object_index,
                                                                const std::vector<CandidateList>& lists,
                                                                const SimConfig& cfg = {});

/// Throws InfeasibleAction when the action fails the feasibility re-check.
ActionOutcome apply_action(const Scene& scene, const Action& a, const SimConfig& cfg = {});

// ---- rendering ----

inline constexpr int kHitNone = -1;
inline constexpr int kHitShelf = -2;
inline constexpr int kHitTarget = -3;

struct DepthRaster {
  int width = 0;
  int height = 0;
  std::vector<float> depth;  // row-major, row 0 at the top of the image
  std::vector<int> hit;      // object id, kHitShelf or kHitTarget

  float at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
};

struct RayHit {
  double distance = 0.0;
  int id = kHitNone;
};

/// First hit along the ray through continuous pixel (u, v).
RayHit cast_pixel(const Scene& scene, double u, double v, bool include_target = true);

DepthRaster render_depth(const Scene& scene, Exec exec = Exec::Parallel);

/// Target pixels visible in the full render over target pixels in a
/// target-only render. 0 (plus a warning) when the target projects to nothing.
double target_visibility_fraction(const Scene& scene, std::vector<std::string>* warnings = nullptr);

}  // namespace shelf

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "shelf/occupancy.hpp"
#include "shelf/simulator.hpp"

namespace shelf {

/// How a suction's support reduction is weighted against a push's.
enum class PsiMode {
  Divide,           // score = dr / psi: suction pays its extra cost
  MultiplyLiteral,  // score = psi * dr
};

struct CostModel {
  double psi = 1.3;
  PsiMode mode = PsiMode::Divide;

  double weighted_cost(int n_push, int n_suction) const { return n_push + psi * n_suction; }
  double action_cost(bool suction) const { return suction ? psi : 1.0; }
  double score(double delta_r, bool suction) const;
};

/// Memo of perception results keyed on quantized object poses. Shared by the
/// steps of one rollout; safe to use from concurrent scoring threads.
class PerceptionCache {
 public:
  explicit PerceptionCache(std::size_t capacity = 200000) : capacity_(capacity) {}
  OccupancyDist1D perceive(const Scene& scene, const TargetSpec& target, const PlacementGrid& grid);
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::size_t capacity_;
  std::size_t hits_ = 0, misses_ = 0;
  std::unordered_map<std::string, OccupancyDist1D> memo_;
};

struct PolicyConfig {
  CostModel cost;
  SimConfig sim;
  PlacementGrid grid;
  TargetSpec target = TargetSpec::make(AspectRatio::Cube);
  int lookahead_depth = 3;
  int lookahead_branching = 5;
  Exec exec = Exec::Serial;
  std::size_t oracle_budget = 20000;
  std::shared_ptr<PerceptionCache> cache;  // rollout() installs one when null
};

struct PolicyState {
  OccupancyDist1D history;  // P'_t
  int t = 0;
  std::vector<Action> log;
};

struct ScoredAction {
  Action action;
  double delta_r = 0.0;
  double score = 0.0;
  bool feasible = true;
  OccupancyDist1D next_history;
};

/// Forward-simulate, perceive, min into the history, and score the support drop.
ScoredAction score_action(const PolicyState& state, const Scene& scene, const Action& a, const PolicyConfig& cfg);

/// Scores every action and sorts by decreasing score. Ties: pushes before
/// suctions, lower object id, smaller |d| (pushes) or lower (x, z) (suctions).
std::vector<ScoredAction> rank_actions(const PolicyState& state, const Scene& scene,
                                       const std::vector<Action>& actions, const PolicyConfig& cfg);

/// Throw NoFeasibleAction when nothing is available.
Action bluction_dar_step(const PolicyState& state, const Scene& scene, const PolicyConfig& cfg);
Action dar_step(const PolicyState& state, const Scene& scene, const PolicyConfig& cfg);
/// `steps_left` truncates the lookahead near the horizon.
Action der3_step(const PolicyState& state, const Scene& scene, const PolicyConfig& cfg, int steps_left = 3);

// ---- oracle ----

enum class ActionSet { Push, PushSuction };

struct OracleResult {
  std::vector<Action> actions;
  double weighted_cost = 0.0;
  bool solvable = false;
  int n_push = 0;
  int n_suction = 0;
  std::size_t expanded = 0;
  bool budget_exhausted = false;
};

/// Overhead triangle from the camera's floor projection to the target's two
/// front footprint corners.
ConvexPolygon visibility_triangle(const Scene& scene);
/// Ids of occluders overlapping the visibility triangle's interior.
std::vector<int> triangle_blockers(const Scene& scene);

/// Minimum weighted-cost action sequence (<= horizon actions) that empties the
/// visibility triangle. A* over object arrangements with a transposition
/// table. The heuristic charges each blocker a push, or a suction when no
/// x between the walls clears it, plus one action when some blocker cannot
/// leave the triangle in one move even with the other blockers gone. Among equal-cost plans the one with fewer
/// actions, then fewer suctions, wins.
OracleResult oracle_search(const Scene& scene, ActionSet actions, int horizon, const CostModel& cost,
                           const SimConfig& sim = {}, std::size_t node_budget = 20000);

// ---- rollouts ----

enum class PolicyKind { DAR, DER3, BluctionDAR, OracleP, OraclePS };

const char* policy_name(PolicyKind p);
PolicyKind policy_from_name(const std::string& name);

struct StepRecord {
  int t = 0;
  Action action;
  int support_before = 0;
  int support_after = 0;
  double visibility_fraction = 0.0;
};

struct RolloutRecord {
  PolicyKind policy = PolicyKind::BluctionDAR;
  std::string outcome;  // success | horizon | no_feasible_action | unsolvable | search_budget | plan_exhausted
  std::vector<StepRecord> steps;
  int n_push = 0;
  int n_suction = 0;
  double weighted_cost = 0.0;
  double oracle_cost = 0.0;  // planned cost for oracle policies

  bool success() const { return outcome == "success"; }
};

/// Perceive, test visibility >= v, act, repeat; failure at t = horizon.
RolloutRecord rollout(PolicyKind policy, const Scene& scene, int horizon, double v, const PolicyConfig& cfg,
                      std::uint64_t seed = 0);

/// One JSON line per step plus a trailer line. A non-negative `trial` adds
/// policy, trial and seed fields to the trailer.
std::string rollout_to_jsonl(const RolloutRecord& r, std::int64_t trial = -1, std::uint64_t seed = 0);

}  // namespace shelf

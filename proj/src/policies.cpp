#include "shelf/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include "json.hpp"

#include "shelf/errors.hpp"

namespace shelf {

namespace {

std::string pose_key(const Scene& scene) {
  std::string key;
  key.reserve(scene.objects.size() * 2 * sizeof(long long));
  for (const auto& o : scene.objects) {
    const long long q[2] = {std::llround(o.pose.x * 1e6), std::llround(o.pose.z * 1e6)};
    key.append(reinterpret_cast<const char*>(q), sizeof q);
  }
  return key;
}

OccupancyDist1D perceive_with(const PolicyConfig& cfg, const Scene& scene, const TargetSpec& target) {
  if (cfg.cache) return cfg.cache->perceive(scene, target, cfg.grid);
  return perceive(scene, target, cfg.grid, Exec::Serial);
}

}  // namespace

OccupancyDist1D PerceptionCache::perceive(const Scene& scene, const TargetSpec& target, const PlacementGrid& grid) {
  const std::string key = pose_key(scene);
  bool found = false;
  OccupancyDist1D out;
#pragma omp critical(shelf_perception_cache)
  {
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      out = it->second;
      found = true;
      ++hits_;
    }
  }
  if (found) return out;
  out = shelf::perceive(scene, target, grid, Exec::Serial);
#pragma omp critical(shelf_perception_cache)
  {
    ++misses_;
    if (memo_.size() >= capacity_) memo_.clear();
    memo_.emplace(key, out);
  }
  return out;
}

double CostModel::score(double delta_r, bool suction) const {
  if (!suction) return delta_r;
  return mode == PsiMode::Divide ? delta_r / psi : psi * delta_r;
}

namespace {

// Strict weak order used everywhere a ranking is needed.
bool ranks_before(const ScoredAction& a, const ScoredAction& b) {
  if (a.score != b.score) return a.score > b.score;
  const bool sa = is_suction(a.action), sb = is_suction(b.action);
  if (sa != sb) return !sa;
  const int ia = action_object(a.action), ib = action_object(b.action);
  if (ia != ib) return ia < ib;
  if (!sa) {
    const double da = std::get<PushAction>(a.action).d, db = std::get<PushAction>(b.action).d;
    if (std::abs(da) != std::abs(db)) return std::abs(da) < std::abs(db);
    return da < db;
  }
  const auto& ka = std::get<SuctionAction>(a.action);
  const auto& kb = std::get<SuctionAction>(b.action);
  if (ka.x != kb.x) return ka.x < kb.x;
  return ka.z < kb.z;
}

std::vector<Action> as_actions(const std::vector<PushAction>& p) { return {p.begin(), p.end()}; }

std::vector<Action> suctions_in_key_order(const Scene& scene, const SimConfig& sim) {
  auto s = feasible_suctions(scene, sim);
  std::sort(s.begin(), s.end(), [](const SuctionAction& a, const SuctionAction& b) {
    if (a.object_id != b.object_id) return a.object_id < b.object_id;
    if (a.x != b.x) return a.x < b.x;
    return a.z < b.z;
  });
  return {s.begin(), s.end()};
}

// Best of pushes and suctions without scoring suctions that cannot win.
// A suction scores at most score(r_t, true); scanning them in tie-break
// order, the first to reach that bound is final.
Action select_greedy(const PolicyState& state, const Scene& scene, bool allow_suction, const PolicyConfig& cfg) {
  const auto pushes = feasible_pushes(scene, cfg.sim);
  const auto ranked = rank_actions(state, scene, as_actions(pushes), cfg);
  std::optional<ScoredAction> best;
  if (!ranked.empty()) best = ranked.front();
  if (allow_suction) {
    const double bound = cfg.cost.score(static_cast<double>(support(state.history)), true);
    if (!best || best->score < bound) {
      for (const Action& a : suctions_in_key_order(scene, cfg.sim)) {
        ScoredAction s = score_action(state, scene, a, cfg);
        if (!best || ranks_before(s, *best)) best = std::move(s);
        if (best->score >= bound) break;
      }
    }
  }
  if (!best) throw NoFeasibleAction();
  return best->action;
}

double leaf_entropy(const OccupancyDist1D& h) { return entropy(normalized(h)); }

// Minimum entropy reachable in `depth` more pushes from (history, scene).
double lookahead(const PolicyState& state, const Scene& scene, int depth, const PolicyConfig& cfg) {
  if (depth == 0) return leaf_entropy(state.history);
  const auto ranked = rank_actions(state, scene, as_actions(feasible_pushes(scene, cfg.sim)), cfg);
  if (ranked.empty()) return leaf_entropy(state.history);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t k = std::min<std::size_t>(ranked.size(), cfg.lookahead_branching);
  for (std::size_t i = 0; i < k; ++i) {
    if (depth == 1) {
      best = std::min(best, leaf_entropy(ranked[i].next_history));
      continue;
    }
    PolicyState child{ranked[i].next_history, state.t + 1, {}};
    const Scene next = apply_action(scene, ranked[i].action, cfg.sim).scene;
    best = std::min(best, lookahead(child, next, depth - 1, cfg));
  }
  return best;
}

}  // namespace

ScoredAction score_action(const PolicyState& state, const Scene& scene, const Action& a, const PolicyConfig& cfg) {
  const Scene next = apply_action(scene, a, cfg.sim).scene;
  const TargetSpec& target = scene.target ? scene.target->spec : cfg.target;
  ScoredAction s;
  s.action = a;
  s.next_history = history_min(perceive_with(cfg, next, target), state.history);
  s.delta_r = static_cast<double>(support(state.history) - support(s.next_history));
  s.score = cfg.cost.score(s.delta_r, is_suction(a));
  return s;
}

std::vector<ScoredAction> rank_actions(const PolicyState& state, const Scene& scene, const std::vector<Action>& actions,
                                       const PolicyConfig& cfg) {
  std::vector<ScoredAction> out(actions.size());
  const int n = static_cast<int>(actions.size());
#pragma omp parallel for schedule(dynamic) if (cfg.exec == Exec::Parallel)
  for (int i = 0; i < n; ++i) out[i] = score_action(state, scene, actions[i], cfg);
  std::stable_sort(out.begin(), out.end(), ranks_before);
  return out;
}

Action bluction_dar_step(const PolicyState& state, const Scene& scene, const PolicyConfig& cfg) {
  return select_greedy(state, scene, true, cfg);
}

Action dar_step(const PolicyState& state, const Scene& scene, const PolicyConfig& cfg) {
  return select_greedy(state, scene, false, cfg);
}

Action der3_step(const PolicyState& state, const Scene& scene, const PolicyConfig& cfg, int steps_left) {
  const int depth = std::max(1, std::min(cfg.lookahead_depth, steps_left));
  const auto ranked = rank_actions(state, scene, as_actions(feasible_pushes(scene, cfg.sim)), cfg);
  if (ranked.empty()) throw NoFeasibleAction();
  const std::size_t k = std::min<std::size_t>(ranked.size(), cfg.lookahead_branching);
  std::size_t best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    double v;
    if (depth == 1) {
      v = leaf_entropy(ranked[i].next_history);
    } else {
      PolicyState child{ranked[i].next_history, state.t + 1, {}};
      v = lookahead(child, apply_action(scene, ranked[i].action, cfg.sim).scene, depth - 1, cfg);
    }
    // Ranked order already encodes the tie-breaks (larger dr, lower id).
    if (v < best - 1e-12) {
      best = v;
      best_i = i;
    }
  }
  return ranked[best_i].action;
}

const char* policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::DAR: return "dar";
    case PolicyKind::DER3: return "der3";
    case PolicyKind::BluctionDAR: return "bluction-dar";
    case PolicyKind::OracleP: return "oracle-p";
    case PolicyKind::OraclePS: return "oracle-ps";
  }
  return "?";
}

PolicyKind policy_from_name(const std::string& name) {
  for (PolicyKind p : {PolicyKind::DAR, PolicyKind::DER3, PolicyKind::BluctionDAR, PolicyKind::OracleP,
                       PolicyKind::OraclePS})
    if (name == policy_name(p)) return p;
  throw ShelfError("unknown policy: " + name);
}

RolloutRecord rollout(PolicyKind policy, const Scene& scene0, int horizon, double v, const PolicyConfig& cfg_in,
                      std::uint64_t /*seed*/) {
  PolicyConfig cfg = cfg_in;
  if (scene0.target) cfg.target = scene0.target->spec;
  if (!cfg.cache) cfg.cache = std::make_shared<PerceptionCache>();
  RolloutRecord rec;
  rec.policy = policy;

  Scene scene = scene0;
  PolicyState state;
  state.history = perceive_with(cfg, scene, cfg.target);

  const bool oracle = policy == PolicyKind::OracleP || policy == PolicyKind::OraclePS;
  std::optional<OracleResult> plan;
  std::size_t plan_pos = 0;

  double vis = target_visibility_fraction(scene);
  while (true) {
    if (vis >= v) {
      rec.outcome = "success";
      break;
    }
    if (state.t >= horizon) {
      rec.outcome = "horizon";
      break;
    }
    Action a;
    if (oracle) {
      if (!plan) {
        plan = oracle_search(scene, policy == PolicyKind::OracleP ? ActionSet::Push : ActionSet::PushSuction, horizon,
                             cfg.cost, cfg.sim, cfg.oracle_budget);
        rec.oracle_cost = plan->weighted_cost;
      }
      if (!plan->solvable) {
        rec.outcome = plan->budget_exhausted ? "search_budget" : "unsolvable";
        break;
      }
      if (plan_pos >= plan->actions.size()) {
        rec.outcome = "plan_exhausted";
        break;
      }
      a = plan->actions[plan_pos++];
    } else {
      try {
        switch (policy) {
          case PolicyKind::DAR: a = dar_step(state, scene, cfg); break;
          case PolicyKind::DER3: a = der3_step(state, scene, cfg, horizon - state.t); break;
          default: a = bluction_dar_step(state, scene, cfg); break;
        }
      } catch (const NoFeasibleAction&) {
        rec.outcome = "no_feasible_action";
        break;
      }
    }

    StepRecord step;
    step.t = state.t;
    step.action = a;
    step.support_before = support(state.history);
    scene = apply_action(scene, a, cfg.sim).scene;
    state.history = history_min(perceive_with(cfg, scene, cfg.target), state.history);
    state.log.push_back(a);
    ++state.t;
    step.support_after = support(state.history);
    vis = target_visibility_fraction(scene);
    step.visibility_fraction = vis;
    rec.steps.push_back(step);
    if (is_suction(a)) ++rec.n_suction;
    else ++rec.n_push;
  }
  rec.weighted_cost = cfg.cost.weighted_cost(rec.n_push, rec.n_suction);
  return rec;
}

std::string rollout_to_jsonl(const RolloutRecord& r, std::int64_t trial, std::uint64_t seed) {
  using nlohmann::ordered_json;
  std::string out;
  for (const auto& s : r.steps) {
    ordered_json action;
    if (const auto* p = std::get_if<PushAction>(&s.action)) {
      action = {{"kind", "push"},
                {"object_id", p->object_id},
                {"params", {{"q", {p->q.x, p->q.y, p->q.z}}, {"d", p->d}}}};
    } else {
      const auto& k = std::get<SuctionAction>(s.action);
      action = {{"kind", "suction"}, {"object_id", k.object_id}, {"params", {{"x", k.x}, {"z", k.z}}}};
    }
    ordered_json line = {{"t", s.t},
                         {"action", action},
                         {"support_before", s.support_before},
                         {"support_after", s.support_after},
                         {"visibility_fraction", s.visibility_fraction}};
    out += line.dump();
    out += '\n';
  }
  ordered_json trailer = {{"outcome", r.outcome},
                          {"steps", r.steps.size()},
                          {"n_push", r.n_push},
                          {"n_suction", r.n_suction},
                          {"weighted_cost", r.weighted_cost}};
  if (trial >= 0) {
    trailer["policy"] = policy_name(r.policy);
    trailer["trial"] = trial;
    trailer["seed"] = seed;
  }
  out += trailer.dump();
  out += '\n';
  return out;
}

}  // namespace shelf

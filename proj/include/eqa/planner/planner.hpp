#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqa/common.hpp"
#include "eqa/grid_search.hpp"
#include "eqa/mapper/semantic_map.hpp"
#include "eqa/motion.hpp"
#include "eqa/oracles/oracle.hpp"
#include "eqa/raycast.hpp"
#include "eqa/world/kinematics.hpp"
#include "eqa/world/sensor.hpp"

namespace eqa::planner {

using mapper::CellState;
using mapper::SemanticMap;

enum class Mode : std::uint8_t { explore, approach, done };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::explore: return "explore";
    case Mode::approach: return "approach";
    case Mode::done: return "done";
  }
  return "done";
}

enum class StopReason : std::uint8_t { itm_threshold, max_steps, map_exhausted, no_navigation };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::itm_threshold: return "itm_threshold";
    case StopReason::max_steps: return "max_steps";
    case StopReason::map_exhausted: return "map_exhausted";
    case StopReason::no_navigation: return "no_navigation";
  }
  return "max_steps";
}

struct PlannerConfig {
  Kinematics kin;
  double unknown_cost = 2.0;
  double memory_range_m = 1.0;
  double facing_tolerance_deg = 15.0;
  // Frontiers closer than this count as already reached.
  double min_frontier_distance_m = 0.25;
  // Final approach: local action search once the target is this close.
  double approach_search_radius_m = 1.5;
  int approach_search_depth = 16;
  double view_min_range_m = 0.2;
  double view_max_range_m = 0.85;
  double view_bearing_deg = 8.0;
  // Viewpoint cells used to get within search radius of the target.
  double viewpoint_min_m = 0.3;
  double viewpoint_max_m = 0.75;
  int max_reselect = 8;
};

struct StopPolicy {
  int max_steps = 100;
  int replan_interval = 25;
  double beta = 0.2;
};

struct MemoryEntry {
  int snapshot_ref = 0;  // step whose snapshot was memorized
  std::string instance_id;
  AgentPose pose;
  double itm_score = 0.0;
  int step_index = 0;
};

struct PlannerState {
  Mode mode = Mode::explore;
  std::optional<Cell> long_term_goal;
  int steps_since_replan = 0;
  int total_steps = 0;
  std::vector<MemoryEntry> memory;
  std::set<Cell> exhausted_frontiers;
  std::set<Cell> exhausted_viewpoints;
  std::deque<Action> queued;
  std::optional<StopReason> stop_reason;
  bool target_seen = false;
  bool last_collided = false;
  bool replanned = false;  // set by next_action when it replanned this step
  std::mt19937_64 rng;

  explicit PlannerState(std::uint64_t seed = 0) : rng(seed ^ 0x9e3779b97f4a7c15ULL) {}

  std::optional<double> best_itm() const {
    std::optional<double> best;
    for (const auto& m : memory) {
      if (!best || m.itm_score > *best) best = m.itm_score;
    }
    return best;
  }
};

// Enter-cost functor for the planning graph: mapped-free and unknown cells
// outside the obstacle inflation, unknown at a premium.
inline auto planning_cost(const SemanticMap& map, const PlannerConfig& cfg) {
  return [&map, premium = cfg.unknown_cost](Cell c) {
    if (!map.plannable(c)) return -1.0;
    return map.state(c) == CellState::unknown ? premium : 1.0;
  };
}

inline bool map_move_ok(const SemanticMap& map, Point from, Point to) {
  return segment_passable(map.frame(), from, to, false, [&](Cell c) { return map.plannable(c); });
}

// ---------------------------------------------------------------------------
// Goal selection
// ---------------------------------------------------------------------------

enum class GoalStatus : std::uint8_t { goal, all_exhausted, exploration_complete };

struct GoalChoice {
  GoalStatus status = GoalStatus::goal;
  Cell goal;
  Mode mode = Mode::explore;
  double distance_m = 0.0;
};

// Target centroid when the category is mapped; otherwise the frontier with
// the smallest planning-graph distance (ties by row, col), skipping exhausted
// frontiers. exploration_complete means no frontier exists at all.
inline GoalChoice select_goal(const SemanticMap& map, const AgentPose& pose, const PlannerState& state,
                              const std::string& target_category, const PlannerConfig& cfg = {}) {
  const auto target = mapper::target_cells(map, target_category);
  if (target.centroid) return {GoalStatus::goal, *target.centroid, Mode::approach, 0.0};

  const auto frontiers = mapper::detect_frontiers(map);
  if (frontiers.empty()) return {GoalStatus::exploration_complete, {}, Mode::explore, 0.0};

  const auto field = distance_field(map.frame(), map.frame().cell_of(pose.position()), planning_cost(map, cfg));
  constexpr double inf = std::numeric_limits<double>::infinity();
  double best_far = inf, best_near = inf;
  Cell far{}, near{};
  for (const auto& f : frontiers) {
    if (state.exhausted_frontiers.count(f)) continue;
    const double d = field[map.frame().index(f)];
    if (!std::isfinite(d)) continue;
    if (d >= cfg.min_frontier_distance_m) {
      if (d < best_far) {
        best_far = d;
        far = f;
      }
    } else if (d < best_near) {
      best_near = d;
      near = f;
    }
  }
  if (std::isfinite(best_far)) return {GoalStatus::goal, far, Mode::explore, best_far};
  if (std::isfinite(best_near)) return {GoalStatus::goal, near, Mode::explore, best_near};
  return {GoalStatus::all_exhausted, {}, Mode::explore, 0.0};
}

// ---------------------------------------------------------------------------
// Path planning
// ---------------------------------------------------------------------------

// A* (octile heuristic) over the planning graph, converted to actions.
// Throws NoPathError when the goal is unreachable.
inline std::vector<Action> plan_path(const SemanticMap& map, const AgentPose& pose, Cell goal,
                                     const PlannerConfig& cfg = {}) {
  const Cell start = map.frame().cell_of(pose.position());
  auto path = astar(map.frame(), start, goal, planning_cost(map, cfg));
  if (!path) {
    throw NoPathError("plan_path: goal (" + std::to_string(goal.row) + "," + std::to_string(goal.col) +
                      ") unreachable");
  }
  auto res = follow_path(pose, std::span<const Cell>(path->cells), map.frame(), cfg.kin,
                         [&](Point a, Point b) { return map_move_ok(map, a, b); });
  return std::move(res.actions);
}

// ---------------------------------------------------------------------------
// Image memory and stopping
// ---------------------------------------------------------------------------

// Appends one entry per target-category contact within range and facing
// tolerance. The ITM oracle is queried at most once per call.
inline void maybe_memorize(const AgentPose& pose, const world::Observation& obs, const oracles::Snapshot& snapshot,
                           const std::string& target_category, oracles::Oracle& itm, std::string_view declarative,
                           std::vector<MemoryEntry>& memory, const PlannerConfig& cfg = {}) {
  const double tol = deg_to_rad(cfg.facing_tolerance_deg);
  std::optional<double> score;
  std::set<std::string> seen;
  for (const auto& c : obs.contacts) {
    if (c.category != target_category) continue;
    if (c.range > cfg.memory_range_m || std::abs(c.bearing) > tol) continue;
    if (!seen.insert(c.instance_id).second) continue;
    if (!score) {
      try {
        score = itm.itm_score(snapshot, declarative);
      } catch (const oracles::OracleError& e) {
        throw oracles::OracleError("step " + std::to_string(obs.step_index) + ": " + e.what());
      }
    }
    memory.push_back({obs.step_index, c.instance_id, pose, *score, obs.step_index});
  }
}

// Strictly greater-than on beta; the step budget is checked second.
inline std::optional<StopReason> check_stop(const PlannerState& state, const StopPolicy& policy) {
  for (const auto& m : state.memory) {
    if (m.itm_score > policy.beta) return StopReason::itm_threshold;
  }
  if (state.total_steps >= policy.max_steps) return StopReason::max_steps;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Final approach
// ---------------------------------------------------------------------------

// Point the agent should face: mean of channel cells near the centroid.
inline Point approach_focus(const SemanticMap& map, const mapper::TargetCells& target) {
  const Point c = map.frame().center_of(*target.centroid);
  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (const auto& cell : target.cells) {
    const Point p = map.frame().center_of(cell);
    if (distance(p, c) <= 0.4 + 1e-9) {
      sx += p.x;
      sy += p.y;
      ++n;
    }
  }
  if (n == 0) return c;
  return {sx / n, sy / n};
}

// Whether the map shows a clear line from p to the focus (channel cells do
// not block).
inline bool map_line_clear(const SemanticMap& map, const SemanticMap::Channel& channel, Point p, Point focus) {
  const double len = distance(p, focus);
  const Cell fc = map.frame().cell_of(focus);
  bool clear = true;
  traverse_ray(map.frame(), p, std::atan2(focus.y - p.y, focus.x - p.x), len, [&](Cell c, double) {
    if (c == fc || channel.count(c)) return false;
    if (map.state(c) == CellState::obstacle) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear;
}

// Breadth-first search over action sequences for the shortest one ending in
// a pose that faces `focus` from close range. Empty result: the current pose
// already qualifies. nullopt: nothing found within the depth limit.
inline std::optional<std::vector<Action>> view_search(const SemanticMap& map, const AgentPose& pose, Point focus,
                                                      const SemanticMap::Channel& channel,
                                                      const std::set<Cell>& excluded, const PlannerConfig& cfg) {
  const auto& kin = cfg.kin;
  const double quantum = kin.turn_step_rad();
  const int headings = kin.heading_count();
  const double bearing_tol = deg_to_rad(cfg.view_bearing_deg);
  const double prune = cfg.approach_search_radius_m + 0.5;

  auto qualifies = [&](const AgentPose& p) {
    const double r = distance(p.position(), focus);
    if (r < cfg.view_min_range_m || r > cfg.view_max_range_m) return false;
    const double b = wrap_pi(std::atan2(focus.y - p.y, focus.x - p.x) - p.theta);
    if (std::abs(b) > bearing_tol) return false;
    if (excluded.count(map.frame().cell_of(p.position()))) return false;
    return map_line_clear(map, channel, p.position(), focus);
  };
  auto key = [&](const AgentPose& p) {
    const auto h = static_cast<int>(std::lround(wrap_two_pi(p.theta) / quantum)) % headings;
    return std::pair<std::size_t, int>(map.frame().index(map.frame().cell_of(p.position())), h);
  };

  struct Node {
    AgentPose pose;
    int parent;
    Action action;
    int depth;
  };
  std::vector<Node> nodes{{pose, -1, Action::stop, 0}};
  if (qualifies(pose)) return std::vector<Action>{};
  std::set<std::pair<std::size_t, int>> visited{key(pose)};
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const Node cur = nodes[head];
    if (cur.depth >= cfg.approach_search_depth) continue;
    for (Action a : {Action::forward, Action::turn_left, Action::turn_right}) {
      const AgentPose next = apply_motion(cur.pose, a, kin);
      if (a == Action::forward) {
        if (distance(next.position(), focus) > prune) continue;
        if (!map_move_ok(map, cur.pose.position(), next.position())) continue;
      }
      if (!visited.insert(key(next)).second) continue;
      nodes.push_back({next, static_cast<int>(head), a, cur.depth + 1});
      if (qualifies(next)) {
        std::vector<Action> seq;
        for (int i = static_cast<int>(nodes.size()) - 1; nodes[static_cast<std::size_t>(i)].parent >= 0;
             i = nodes[static_cast<std::size_t>(i)].parent) {
          seq.push_back(nodes[static_cast<std::size_t>(i)].action);
        }
        std::reverse(seq.begin(), seq.end());
        return seq;
      }
    }
  }
  return std::nullopt;
}

namespace detail {

inline std::vector<Action> plan_approach(const SemanticMap& map, const AgentPose& pose, PlannerState& state,
                                         const mapper::TargetCells& target, const std::string& category,
                                         const PlannerConfig& cfg) {
  const Point focus = approach_focus(map, target);
  const auto& channel = map.channels().at(category);
  if (distance(pose.position(), focus) <= cfg.approach_search_radius_m) {
    auto seq = view_search(map, pose, focus, channel, state.exhausted_viewpoints, cfg);
    if (seq && seq->empty()) {
      // current pose looks right on the map but memorized nothing
      state.exhausted_viewpoints.insert(map.frame().cell_of(pose.position()));
      seq = view_search(map, pose, focus, channel, state.exhausted_viewpoints, cfg);
    }
    if (seq && !seq->empty()) return std::move(*seq);
  }

  const auto field = distance_field(map.frame(), map.frame().cell_of(pose.position()), planning_cost(map, cfg));
  for (int attempt = 0; attempt < cfg.max_reselect; ++attempt) {
    std::optional<Cell> best;
    double best_d = std::numeric_limits<double>::infinity();
    bool best_known = false;
    for (std::size_t i = 0; i < field.size(); ++i) {
      if (!std::isfinite(field[i])) continue;
      const Cell c = map.frame().cell_at(i);
      const double r = distance(map.frame().center_of(c), focus);
      if (r < cfg.viewpoint_min_m || r > cfg.viewpoint_max_m) continue;
      if (state.exhausted_viewpoints.count(c)) continue;
      const bool known = map.state(c) == CellState::free;
      // known-free viewpoints first, then nearest
      if ((known && !best_known) || (known == best_known && field[i] < best_d)) {
        best = c;
        best_d = field[i];
        best_known = known;
      }
    }
    if (!best) return {};
    auto actions = plan_path(map, pose, *best, cfg);
    if (!actions.empty()) return actions;
    state.exhausted_viewpoints.insert(*best);
  }
  return {};
}

}  // namespace detail

// Chooses the next action. Replans when the replan interval has elapsed, the
// target category first appears, the queue is empty (goal reached), the last
// move collided, or the next queued move is blocked on the current map.
// Returns Action::stop (with state.stop_reason = map_exhausted) only when no
// frontier and no target remain; degenerate cases fall back to a seeded
// random move.
inline Action next_action(const SemanticMap& map, const AgentPose& pose, PlannerState& state,
                          const StopPolicy& policy, const std::string& target_category,
                          const PlannerConfig& cfg = {}) {
  const auto target = mapper::target_cells(map, target_category);
  const bool newly_detected = !target.cells.empty() && !state.target_seen;
  if (!target.cells.empty()) state.target_seen = true;

  bool replan = state.queued.empty() || state.steps_since_replan >= policy.replan_interval || newly_detected ||
                state.last_collided;
  if (!replan && state.queued.front() == Action::forward) {
    const AgentPose next = apply_motion(pose, Action::forward, cfg.kin);
    replan = !map_move_ok(map, pose.position(), next.position());
  }
  state.replanned = replan;

  if (replan) {
    state.steps_since_replan = 0;
    state.queued.clear();
    for (int attempt = 0; attempt < cfg.max_reselect && state.queued.empty(); ++attempt) {
      const auto choice = select_goal(map, pose, state, target_category, cfg);
      if (choice.status == GoalStatus::exploration_complete) {
        state.mode = Mode::done;
        state.stop_reason = StopReason::map_exhausted;
        return Action::stop;
      }
      if (choice.status == GoalStatus::all_exhausted) break;
      state.long_term_goal = choice.goal;
      state.mode = choice.mode;
      if (choice.mode == Mode::approach) {
        const auto actions = detail::plan_approach(map, pose, state, target, target_category, cfg);
        state.queued.assign(actions.begin(), actions.end());
        break;
      }
      try {
        const auto actions = plan_path(map, pose, choice.goal, cfg);
        if (actions.empty()) {
          state.exhausted_frontiers.insert(choice.goal);
          continue;
        }
        state.queued.assign(actions.begin(), actions.end());
      } catch (const NoPathError&) {
        state.exhausted_frontiers.insert(choice.goal);
      }
    }
  }

  if (state.queued.empty()) {
    static constexpr Action moves[3] = {Action::forward, Action::turn_left, Action::turn_right};
    return moves[state.rng() % 3];
  }
  const Action a = state.queued.front();
  state.queued.pop_front();
  return a;
}

}  // namespace eqa::planner

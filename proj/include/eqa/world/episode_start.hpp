#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "eqa/common.hpp"
#include "eqa/motion.hpp"
#include "eqa/world/geodesic.hpp"
#include "eqa/world/kinematics.hpp"
#include "eqa/world/scene.hpp"

namespace eqa::world {

enum class StartOffset : std::uint8_t { t10, t30, t50, random };

inline std::string_view to_string(StartOffset o) {
  switch (o) {
    case StartOffset::t10: return "t10";
    case StartOffset::t30: return "t30";
    case StartOffset::t50: return "t50";
    case StartOffset::random: return "random";
  }
  return "random";
}

inline std::optional<StartOffset> start_offset_from(std::string_view s) {
  for (auto o : {StartOffset::t10, StartOffset::t30, StartOffset::t50, StartOffset::random}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

inline int offset_actions(StartOffset o) {
  switch (o) {
    case StartOffset::t10: return 10;
    case StartOffset::t30: return 30;
    case StartOffset::t50: return 50;
    case StartOffset::random: return -1;
  }
  return -1;
}

struct BackoffPlan {
  AgentPose start;
  std::vector<Action> actions_to_end;  // executed from start, reaches the end pose
};

// The traversable cell geodesically farthest from `from` (ties by row, col).
inline Cell farthest_cell(const GridScene& scene, Cell from) {
  const auto field = geodesic_field(scene, from);
  Cell best = from;
  double best_d = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (std::isfinite(field[i]) && field[i] > best_d) {
      best_d = field[i];
      best = scene.frame.cell_at(i);
    }
  }
  return best;
}

// Walks `n` actions back from the end pose along the shortest path towards
// the farthest reachable cell. Forward moves and turns both count; stops
// early at the far end of the path.
inline BackoffPlan back_off(const GridScene& scene, const QAItem& qa, int n, const Kinematics& kin = {}) {
  BackoffPlan plan{qa.end_pose, {}};
  if (n <= 0) return plan;
  const Cell end = scene.frame.cell_of(qa.end_pose.position());
  const Cell far = farthest_cell(scene, end);
  if (far == end) return plan;
  const auto path = shortest_path(scene, end, far);
  FollowOptions opt;
  opt.reverse = true;
  opt.max_actions = static_cast<std::size_t>(n);
  const auto res = follow_path(
      qa.end_pose, std::span<const Cell>(path.cells), scene.frame, kin,
      [&](Point a, Point b) {
        return segment_passable(scene.frame, a, b, true, [&](Cell c) { return scene.traversable(c); });
      },
      opt);
  plan.start = res.end;
  plan.actions_to_end.assign(res.actions.rbegin(), res.actions.rend());
  return plan;
}

inline AgentPose random_start(const GridScene& scene, const QAItem& qa, std::uint64_t seed, const Kinematics& kin = {}) {
  const auto field = geodesic_field(scene, scene.frame.cell_of(qa.end_pose.position()));
  std::vector<std::size_t> component;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (std::isfinite(field[i])) component.push_back(i);
  }
  std::mt19937_64 rng(seed);
  const Cell c = scene.frame.cell_at(component[rng() % component.size()]);
  const auto heading = static_cast<int>(rng() % static_cast<std::uint64_t>(kin.heading_count()));
  const Point p = scene.frame.center_of(c);
  return {p.x, p.y, wrap_two_pi(heading * kin.turn_step_rad())};
}

inline AgentPose make_start(const GridScene& scene, const QAItem& qa, StartOffset offset, std::uint64_t seed,
                            const Kinematics& kin = {}) {
  if (offset == StartOffset::random) return random_start(scene, qa, seed, kin);
  return back_off(scene, qa, offset_actions(offset), kin).start;
}

}  // namespace eqa::world

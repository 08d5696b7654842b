#pragma once

#include <cmath>

#include "eqa/common.hpp"
#include "eqa/world/scene.hpp"

namespace eqa {

// Samples the segment a->b at quarter-cell spacing and asks `passable` about
// each sample's cell. The sample set is symmetric in (a, b).
template <class Passable>
bool segment_passable(const GridFrame& frame, Point a, Point b, bool include_start, Passable&& passable) {
  const double len = distance(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(len / (frame.cell_size * 0.25))));
  for (int k = include_start ? 0 : 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    const Point p{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
    if (!passable(frame.cell_of(p))) return false;
  }
  return true;
}

// Pose after the action with no collision check.
inline AgentPose apply_motion(const AgentPose& pose, Action action, const Kinematics& kin) {
  AgentPose out = pose;
  switch (action) {
    case Action::forward:
      out.x += kin.forward_step_m * std::cos(pose.theta);
      out.y += kin.forward_step_m * std::sin(pose.theta);
      break;
    case Action::turn_left: out.theta = wrap_two_pi(pose.theta + kin.turn_step_rad()); break;
    case Action::turn_right: out.theta = wrap_two_pi(pose.theta - kin.turn_step_rad()); break;
    case Action::stop: break;
  }
  return out;
}

}  // namespace eqa

namespace eqa::world {

struct StepResult {
  AgentPose pose;
  bool collided = false;
};

// Forward moves are blocked when any cell swept by the move is not
// traversable (solid or inside the 1-cell inflation); the pose is unchanged.
inline StepResult step(const GridScene& scene, const AgentPose& pose, Action action, const Kinematics& kin = {}) {
  const AgentPose next = apply_motion(pose, action, kin);
  if (action != Action::forward) return {next, false};
  const bool clear = segment_passable(scene.frame, pose.position(), next.position(), false,
                                      [&](Cell c) { return scene.traversable(c); });
  if (!clear) return {pose, true};
  return {next, false};
}

}  // namespace eqa::world

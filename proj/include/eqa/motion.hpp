#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "eqa/common.hpp"
#include "eqa/world/kinematics.hpp"

namespace eqa {

struct FollowOptions {
  // Reverse mode walks the path backwards in time: the body faces away from
  // the travel direction and each recorded action is the one that, executed
  // from the new pose, returns to the previous one.
  bool reverse = false;
  std::size_t max_actions = 400;
  double arrive_radius_m = -1.0;  // < 0: half a forward step
  int max_heading_deviation = 2;  // in turn quanta
};

struct FollowResult {
  std::vector<Action> actions;
  AgentPose end;
  bool arrived = false;
};

// Converts a cell path to discrete actions: turn to the nearest heading that
// points at a lookahead waypoint, then step forward. can_move(from, to)
// decides whether a forward move is allowed.
template <class CanMove>
FollowResult follow_path(const AgentPose& start, std::span<const Cell> path, const GridFrame& frame,
                         const Kinematics& kin, CanMove&& can_move, FollowOptions opt = {}) {
  FollowResult out;
  out.end = start;
  if (path.empty()) {
    out.arrived = true;
    return out;
  }
  const double arrive = opt.arrive_radius_m < 0.0 ? kin.forward_step_m * 0.5 : opt.arrive_radius_m;
  const double quantum = kin.turn_step_rad();
  const int half_turn = kin.heading_count() / 2;
  const std::size_t cells_per_step =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(kin.forward_step_m / frame.cell_size)));
  const std::size_t last = path.size() - 1;
  const Point goal = frame.center_of(path[last]);
  const double sign = opt.reverse ? -1.0 : 1.0;
  const Action rotate_pos = opt.reverse ? Action::turn_right : Action::turn_left;
  const Action rotate_neg = opt.reverse ? Action::turn_left : Action::turn_right;

  AgentPose pose = start;
  std::size_t idx = 0;
  auto emit = [&](Action a) {
    if (out.actions.size() >= opt.max_actions) return false;
    out.actions.push_back(a);
    return true;
  };

  while (out.actions.size() < opt.max_actions) {
    const Point here = pose.position();
    if (distance(here, goal) <= arrive) {
      out.arrived = true;
      break;
    }
    const std::size_t window = std::min(last, idx + 4 * cells_per_step);
    double best = distance(here, frame.center_of(path[idx]));
    for (std::size_t j = idx + 1; j <= window; ++j) {
      const double d = distance(here, frame.center_of(path[j]));
      if (d <= best) {
        best = d;
        idx = j;
      }
    }
    const Point wp = frame.center_of(path[std::min(last, idx + cells_per_step)]);
    const double travel = std::atan2(wp.y - here.y, wp.x - here.x);
    const double body = opt.reverse ? travel + kPi : travel;
    int k0 = static_cast<int>(std::lround(wrap_pi(body - pose.theta) / quantum));
    if (k0 == -half_turn) k0 = half_turn;

    // candidate rotations ordered by deviation from the desired heading
    std::vector<int> cands{k0};
    for (int d = 1; d <= opt.max_heading_deviation; ++d) {
      const double err = wrap_pi(body - pose.theta) / quantum - k0;
      if (err >= 0) {
        cands.push_back(k0 + d);
        cands.push_back(k0 - d);
      } else {
        cands.push_back(k0 - d);
        cands.push_back(k0 + d);
      }
    }

    bool moved = false;
    const double here_wp = distance(here, wp);
    for (int k : cands) {
      if (k > half_turn) k -= 2 * half_turn;
      if (k < -half_turn + 1) k += 2 * half_turn;
      const double heading = pose.theta + k * quantum;
      const Point next{here.x + sign * kin.forward_step_m * std::cos(heading),
                       here.y + sign * kin.forward_step_m * std::sin(heading)};
      if (distance(next, wp) >= here_wp - 1e-9) continue;
      if (!can_move(here, next)) continue;
      for (int t = 0; t < std::abs(k); ++t) {
        if (!emit(k > 0 ? rotate_pos : rotate_neg)) {
          out.end = pose;
          return out;
        }
        pose.theta = wrap_two_pi(pose.theta + (k > 0 ? quantum : -quantum));
      }
      if (!emit(Action::forward)) {
        out.end = pose;
        return out;
      }
      pose.x = next.x;
      pose.y = next.y;
      moved = true;
      break;
    }
    if (!moved) break;
  }
  out.end = pose;
  return out;
}

// Turns (shortest direction, left on ties) that bring the heading closest to
// `bearing`.
inline std::vector<Action> turns_toward(double theta, double bearing, const Kinematics& kin) {
  const double quantum = kin.turn_step_rad();
  const int half_turn = kin.heading_count() / 2;
  int k = static_cast<int>(std::lround(wrap_pi(bearing - theta) / quantum));
  if (k == -half_turn) k = half_turn;
  std::vector<Action> out(static_cast<std::size_t>(std::abs(k)), k > 0 ? Action::turn_left : Action::turn_right);
  return out;
}

}  // namespace eqa

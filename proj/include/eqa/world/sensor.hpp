#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "eqa/common.hpp"
#include "eqa/raycast.hpp"
#include "eqa/world/scene.hpp"

namespace eqa::world {

struct Contact {
  std::string instance_id;
  std::string category;
  double visibility_fraction = 0.0;
  double bearing = 0.0;  // to the instance center, relative to heading, (-π, π]
  double range = 0.0;    // to the instance center, meters
  std::vector<Cell> visible_cells;
};

struct Observation {
  GridFrame frame;
  int step_index = 0;
  double max_range_m = 5.0;
  std::vector<double> ray_bearings;  // relative to heading
  std::vector<double> rays;          // depth per bearing, clamped to max_range_m
  std::vector<Contact> contacts;
};

inline std::vector<double> ray_bearings(const SensorConfig& cfg) {
  std::vector<double> out(static_cast<std::size_t>(cfg.ray_count));
  const double fov = deg_to_rad(cfg.fov_deg);
  for (int i = 0; i < cfg.ray_count; ++i) {
    out[static_cast<std::size_t>(i)] = -fov / 2.0 + fov * (i + 0.5) / cfg.ray_count;
  }
  return out;
}

// Distance to the first solid-cell boundary along `angle`, clamped.
inline double cast_ray(const GridScene& scene, Point origin, double angle, double max_range) {
  double hit = max_range;
  traverse_ray(scene.frame, origin, angle, max_range, [&](Cell c, double t) {
    if (scene.solid(c)) {
      hit = std::min(t, max_range);
      return false;
    }
    return true;
  });
  return hit;
}

// Whether the straight line from `origin` to the center of `target` enters
// `target` before any other solid cell. Cells of the object owning `target`
// do not occlude it.
inline bool line_of_sight(const GridScene& scene, Point origin, Cell target) {
  const int self = scene.owner(target);
  const Point tc = scene.frame.center_of(target);
  const double len = distance(origin, tc);
  bool seen = false;
  traverse_ray(scene.frame, origin, std::atan2(tc.y - origin.y, tc.x - origin.x), len + scene.frame.cell_size,
               [&](Cell c, double) {
                 if (c == target) {
                   seen = true;
                   return false;
                 }
                 return !scene.solid(c) || (self >= 0 && scene.owner(c) == self);
               });
  return seen;
}

inline Observation observe(const GridScene& scene, const AgentPose& pose, const SensorConfig& cfg = {},
                           int step_index = 0) {
  Observation obs;
  obs.frame = scene.frame;
  obs.step_index = step_index;
  obs.max_range_m = cfg.max_range_m;
  obs.ray_bearings = ray_bearings(cfg);
  obs.rays.reserve(obs.ray_bearings.size());
  const Point origin = pose.position();
  for (double b : obs.ray_bearings) obs.rays.push_back(cast_ray(scene, origin, pose.theta + b, cfg.max_range_m));

  const double half_fov = deg_to_rad(cfg.fov_deg) / 2.0;
  for (const auto& obj : scene.objects) {
    Contact contact;
    for (const auto& cell : obj.footprint) {
      const Point cc = scene.frame.center_of(cell);
      if (distance(origin, cc) > cfg.max_range_m) continue;
      const double bearing = wrap_pi(std::atan2(cc.y - origin.y, cc.x - origin.x) - pose.theta);
      if (std::abs(bearing) > half_fov) continue;
      if (line_of_sight(scene, origin, cell)) contact.visible_cells.push_back(cell);
    }
    if (contact.visible_cells.empty()) continue;
    contact.instance_id = obj.id;
    contact.category = obj.category;
    contact.visibility_fraction =
        static_cast<double>(contact.visible_cells.size()) / static_cast<double>(obj.footprint.size());
    contact.bearing = wrap_pi(std::atan2(obj.center.y - origin.y, obj.center.x - origin.x) - pose.theta);
    contact.range = distance(origin, obj.center);
    obs.contacts.push_back(std::move(contact));
  }
  return obs;
}

}  // namespace eqa::world

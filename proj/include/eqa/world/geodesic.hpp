#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "eqa/common.hpp"
#include "eqa/grid_search.hpp"
#include "eqa/world/scene.hpp"

namespace eqa::world {

inline auto traversable_cost(const GridScene& scene) {
  return [&scene](Cell c) { return scene.traversable(c) ? 1.0 : -1.0; };
}

// Minimal 8-connected path over traversable cells. The endpoints only need
// to be free, so a pose inside the inflation band still has a distance.
// Throws NoPathError when the endpoints lie in different components.
inline GridPath shortest_path(const GridScene& scene, Cell a, Cell b) {
  if (!scene.is_free(a) || !scene.is_free(b)) {
    throw NoPathError("shortest_path: endpoint (" + std::to_string(a.row) + "," + std::to_string(a.col) +
                      ") or (" + std::to_string(b.row) + "," + std::to_string(b.col) + ") is not free");
  }
  auto path = astar(scene.frame, a, b, [&](Cell c) { return scene.traversable(c) || c == b ? 1.0 : -1.0; });
  if (!path) {
    throw NoPathError("shortest_path: no path between (" + std::to_string(a.row) + "," + std::to_string(a.col) +
                      ") and (" + std::to_string(b.row) + "," + std::to_string(b.col) + ")");
  }
  return *path;
}

inline GridPath shortest_path(const GridScene& scene, const AgentPose& a, const AgentPose& b) {
  return shortest_path(scene, scene.frame.cell_of(a.position()), scene.frame.cell_of(b.position()));
}

inline double geodesic_distance(const GridScene& scene, const AgentPose& a, const AgentPose& b) {
  return shortest_path(scene, a, b).length_m;
}

inline std::vector<double> geodesic_field(const GridScene& scene, Cell from) {
  return distance_field(scene.frame, from, traversable_cost(scene));
}

}  // namespace eqa::world

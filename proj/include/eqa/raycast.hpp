#pragma once

#include <cmath>
#include <limits>

#include "eqa/common.hpp"

namespace eqa {

// Amanatides-Woo grid traversal. Calls visit(cell, t_entry_m) for every cell
// the ray enters, in order, starting with the origin cell at t = 0. Cells may
// be out of bounds; the visitor decides what that means. Stops when the
// visitor returns false or the entry distance exceeds max_dist.
template <class Visit>
void traverse_ray(const GridFrame& frame, Point origin, double angle, double max_dist, Visit&& visit) {
  const double s = frame.cell_size;
  const double ox = origin.x / s;
  const double oy = origin.y / s;
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  constexpr double inf = std::numeric_limits<double>::infinity();

  Cell cell{static_cast<int>(std::floor(oy)), static_cast<int>(std::floor(ox))};
  const int step_c = dx > 0.0 ? 1 : -1;
  const int step_r = dy > 0.0 ? 1 : -1;
  double t_max_x = inf;
  double t_max_y = inf;
  double t_delta_x = inf;
  double t_delta_y = inf;
  if (std::abs(dx) > 1e-15) {
    t_delta_x = 1.0 / std::abs(dx);
    t_max_x = dx > 0.0 ? (cell.col + 1 - ox) / dx : (ox - cell.col) / -dx;
  }
  if (std::abs(dy) > 1e-15) {
    t_delta_y = 1.0 / std::abs(dy);
    t_max_y = dy > 0.0 ? (cell.row + 1 - oy) / dy : (oy - cell.row) / -dy;
  }

  if (!visit(cell, 0.0)) return;
  const double max_t = max_dist / s;
  for (;;) {
    double t;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      cell.col += step_c;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      cell.row += step_r;
    }
    if (t > max_t) return;
    if (!visit(cell, t * s)) return;
  }
}

}  // namespace eqa

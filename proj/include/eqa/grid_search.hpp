#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "eqa/common.hpp"

namespace eqa {

struct GridPath {
  std::vector<Cell> cells;
  double length_m = 0.0;
};

inline constexpr int kNeighbors8[8][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
inline constexpr int kNeighbors4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};

// Octile distance in meters; admissible when every enter multiplier >= 1.
inline double octile_distance(Cell a, Cell b, double cell_size) {
  const double dr = std::abs(a.row - b.row);
  const double dc = std::abs(a.col - b.col);
  return cell_size * ((std::max(dr, dc) - std::min(dr, dc)) + std::numbers::sqrt2 * std::min(dr, dc));
}

namespace detail {

struct OpenEntry {
  double f;
  double g;
  std::uint32_t idx;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.idx > b.idx;
  }
};

using OpenQueue = std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder>;

inline std::vector<Cell> unwind(const GridFrame& frame, const std::vector<std::int32_t>& parent, std::size_t goal) {
  std::vector<Cell> out;
  for (auto i = static_cast<std::int64_t>(goal); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    out.push_back(frame.cell_at(static_cast<std::size_t>(i)));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace detail

// 8-connected search. enter_cost(cell) returns the multiplier applied to the
// geometric step cost when entering `cell`, or a negative value if the cell
// is impassable. Diagonal steps cost sqrt(2) * cell_size before scaling.
template <class EnterCost>
std::optional<GridPath> astar(const GridFrame& frame, Cell start, Cell goal, EnterCost&& enter_cost) {
  if (!frame.in_bounds(start) || !frame.in_bounds(goal)) return std::nullopt;
  if (start == goal) return GridPath{{start}, 0.0};
  if (enter_cost(goal) < 0.0) return std::nullopt;

  const double s = frame.cell_size;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(frame.size(), inf);
  std::vector<std::int32_t> parent(frame.size(), -1);
  std::vector<std::uint8_t> closed(frame.size(), 0);
  detail::OpenQueue open;

  const auto start_idx = frame.index(start);
  const auto goal_idx = frame.index(goal);
  g[start_idx] = 0.0;
  open.push({octile_distance(start, goal, s), 0.0, static_cast<std::uint32_t>(start_idx)});

  while (!open.empty()) {
    const auto top = open.top();
    open.pop();
    if (closed[top.idx]) continue;
    closed[top.idx] = 1;
    if (top.idx == goal_idx) {
      return GridPath{detail::unwind(frame, parent, goal_idx), g[goal_idx]};
    }
    const Cell cur = frame.cell_at(top.idx);
    for (int k = 0; k < 8; ++k) {
      const Cell nb{cur.row + kNeighbors8[k][0], cur.col + kNeighbors8[k][1]};
      if (!frame.in_bounds(nb)) continue;
      const auto ni = frame.index(nb);
      if (closed[ni]) continue;
      const double mult = enter_cost(nb);
      if (mult < 0.0) continue;
      const double step = (k < 4 ? s : std::numbers::sqrt2 * s) * mult;
      const double cand = g[top.idx] + step;
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = static_cast<std::int32_t>(top.idx);
        open.push({cand + octile_distance(nb, goal, s), cand, static_cast<std::uint32_t>(ni)});
      }
    }
  }
  return std::nullopt;
}

// Single-source distances (meters) to every cell; unreachable cells hold +inf.
// If `parent` is non-null it receives the predecessor index of each cell.
template <class EnterCost>
std::vector<double> distance_field(const GridFrame& frame, Cell start, EnterCost&& enter_cost,
                                   std::vector<std::int32_t>* parent = nullptr) {
  const double s = frame.cell_size;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(frame.size(), inf);
  if (parent) parent->assign(frame.size(), -1);
  if (!frame.in_bounds(start)) return g;

  std::vector<std::uint8_t> closed(frame.size(), 0);
  detail::OpenQueue open;
  const auto start_idx = frame.index(start);
  g[start_idx] = 0.0;
  open.push({0.0, 0.0, static_cast<std::uint32_t>(start_idx)});
  while (!open.empty()) {
    const auto top = open.top();
    open.pop();
    if (closed[top.idx]) continue;
    closed[top.idx] = 1;
    const Cell cur = frame.cell_at(top.idx);
    for (int k = 0; k < 8; ++k) {
      const Cell nb{cur.row + kNeighbors8[k][0], cur.col + kNeighbors8[k][1]};
      if (!frame.in_bounds(nb)) continue;
      const auto ni = frame.index(nb);
      if (closed[ni]) continue;
      const double mult = enter_cost(nb);
      if (mult < 0.0) continue;
      const double cand = g[top.idx] + (k < 4 ? s : std::numbers::sqrt2 * s) * mult;
      if (cand < g[ni]) {
        g[ni] = cand;
        if (parent) (*parent)[ni] = static_cast<std::int32_t>(top.idx);
        open.push({cand, cand, static_cast<std::uint32_t>(ni)});
      }
    }
  }
  return g;
}

inline std::vector<Cell> path_from_parents(const GridFrame& frame, const std::vector<std::int32_t>& parent, Cell goal) {
  return detail::unwind(frame, parent, frame.index(goal));
}

}  // namespace eqa

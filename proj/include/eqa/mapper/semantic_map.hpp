#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqa/common.hpp"
#include "eqa/grid_search.hpp"
#include "eqa/raycast.hpp"
#include "eqa/world/sensor.hpp"

namespace eqa::mapper {

enum class CellState : std::uint8_t { unknown, free, obstacle };

// Agent-built top-down map. Cell states only refine: unknown -> free,
// unknown -> obstacle, free -> obstacle. Semantic cells are never retracted.
class SemanticMap {
 public:
  using Channel = std::map<Cell, double>;  // cell -> max confidence seen

  SemanticMap() = default;
  explicit SemanticMap(GridFrame frame) : frame_(frame), state_(frame.size(), CellState::unknown) {}

  const GridFrame& frame() const { return frame_; }

  // Out-of-bounds reads as obstacle.
  CellState state(Cell c) const { return frame_.in_bounds(c) ? state_[frame_.index(c)] : CellState::obstacle; }

  void mark_free(Cell c) {
    if (!frame_.in_bounds(c)) return;
    auto& s = state_[frame_.index(c)];
    if (s == CellState::unknown) {
      s = CellState::free;
      ++known_;
    }
  }

  void mark_obstacle(Cell c) {
    if (!frame_.in_bounds(c)) return;
    auto& s = state_[frame_.index(c)];
    if (s == CellState::unknown) ++known_;
    s = CellState::obstacle;
  }

  void add_semantic(const std::string& category, Cell c, double confidence) {
    if (!frame_.in_bounds(c)) return;
    if (state(c) == CellState::unknown) mark_obstacle(c);
    auto& ch = channels_[category];
    auto [it, fresh] = ch.emplace(c, confidence);
    if (!fresh) it->second = std::max(it->second, confidence);
  }

  std::size_t known_count() const { return known_; }

  const std::map<std::string, Channel>& channels() const { return channels_; }

  // Not a mapped obstacle and no mapped obstacle among the 8 neighbours.
  // Unknown cells are plannable.
  bool plannable(Cell c) const {
    if (!frame_.in_bounds(c)) return false;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (state({c.row + dr, c.col + dc}) == CellState::obstacle) return false;
      }
    }
    return true;
  }

 private:
  GridFrame frame_;
  std::vector<CellState> state_;
  std::map<std::string, Channel> channels_;
  std::size_t known_ = 0;
};

// Mock detector: confidence is the visible fraction of the instance.
struct DetectionModel {
  double alpha = 0.2;

  double confidence(const world::Contact& c) const { return c.visibility_fraction; }
  bool accepts(const world::Contact& c) const { return confidence(c) >= alpha; }
};

// Carves free space along each ray up to its hit, marks the hit cell as an
// obstacle (rays at max range mark none), then projects accepted detections
// into their category channels.
inline void update_map(SemanticMap& map, const AgentPose& pose, const world::Observation& obs,
                       const DetectionModel& det) {
  if (!(obs.frame == map.frame())) {
    throw FrameMismatchError("update_map: map is " + std::to_string(map.frame().width) + "x" +
                             std::to_string(map.frame().height) + ", observation frame is " +
                             std::to_string(obs.frame.width) + "x" + std::to_string(obs.frame.height));
  }
  const Point origin = pose.position();
  constexpr double eps = 1e-9;
  for (std::size_t i = 0; i < obs.rays.size(); ++i) {
    const double d = obs.rays[i];
    const bool hit = d < obs.max_range_m - eps;
    traverse_ray(map.frame(), origin, pose.theta + obs.ray_bearings[i], d + map.frame().cell_size,
                 [&](Cell c, double t) {
                   if (t < d - eps) {
                     map.mark_free(c);
                     return true;
                   }
                   if (hit) map.mark_obstacle(c);
                   return false;
                 });
  }
  for (const auto& contact : obs.contacts) {
    if (!det.accepts(contact)) continue;
    const double conf = det.confidence(contact);
    for (const auto& c : contact.visible_cells) map.add_semantic(contact.category, c, conf);
  }
}

// Free cells with at least one 4-neighbour in the unknown state, row-major.
inline std::vector<Cell> detect_frontiers(const SemanticMap& map) {
  std::vector<Cell> out;
  const auto& f = map.frame();
  for (int r = 0; r < f.height; ++r) {
    for (int c = 0; c < f.width; ++c) {
      if (map.state({r, c}) != CellState::free) continue;
      for (const auto& d : kNeighbors4) {
        const Cell n{r + d[0], c + d[1]};
        if (f.in_bounds(n) && map.state(n) == CellState::unknown) {
          out.push_back({r, c});
          break;
        }
      }
    }
  }
  return out;
}

struct TargetCells {
  std::vector<Cell> cells;
  std::optional<Cell> centroid;  // channel cell nearest the mean, ties by (row, col)
  std::optional<Point> mean;     // metric mean of the channel cell centers
};

inline TargetCells target_cells(const SemanticMap& map, const std::string& category) {
  TargetCells out;
  const auto it = map.channels().find(category);
  if (it == map.channels().end() || it->second.empty()) return out;
  double sr = 0.0, sc = 0.0;
  for (const auto& [c, conf] : it->second) {
    out.cells.push_back(c);
    sr += c.row;
    sc += c.col;
  }
  const double n = static_cast<double>(out.cells.size());
  const double mr = sr / n, mc = sc / n;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : out.cells) {
    const double d = (c.row - mr) * (c.row - mr) + (c.col - mc) * (c.col - mc);
    if (d < best) {
      best = d;
      out.centroid = c;
    }
  }
  out.mean = Point{(mc + 0.5) * map.frame().cell_size, (mr + 0.5) * map.frame().cell_size};
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot export
// ---------------------------------------------------------------------------

// Letter assigned to each tracked category, in sorted category order.
inline std::map<std::string, char> category_legend(const SemanticMap& map) {
  std::map<std::string, char> legend;
  char next = 'A';
  for (const auto& [cat, ch] : map.channels()) {
    legend[cat] = next;
    if (next < 'Z') ++next;
  }
  return legend;
}

// One line per row: '?' unknown, '.' free, '#' obstacle, uppercase letter
// for semantic cells.
inline std::vector<std::string> map_to_text(const SemanticMap& map) {
  const auto& f = map.frame();
  std::vector<std::string> lines(static_cast<std::size_t>(f.height), std::string(static_cast<std::size_t>(f.width), '?'));
  for (int r = 0; r < f.height; ++r) {
    for (int c = 0; c < f.width; ++c) {
      char g = '?';
      switch (map.state({r, c})) {
        case CellState::unknown: g = '?'; break;
        case CellState::free: g = '.'; break;
        case CellState::obstacle: g = '#'; break;
      }
      lines[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = g;
    }
  }
  for (const auto& [cat, letter] : category_legend(map)) {
    for (const auto& [cell, conf] : map.channels().at(cat)) {
      lines[static_cast<std::size_t>(cell.row)][static_cast<std::size_t>(cell.col)] = letter;
    }
  }
  return lines;
}

inline nlohmann::ordered_json map_channels_json(const SemanticMap& map) {
  nlohmann::ordered_json out;
  out["width"] = map.frame().width;
  out["height"] = map.frame().height;
  out["cell_size"] = map.frame().cell_size;
  auto& legend = out["legend"] = nlohmann::ordered_json::object();
  for (const auto& [cat, letter] : category_legend(map)) legend[std::string(1, letter)] = cat;
  auto& channels = out["channels"] = nlohmann::ordered_json::object();
  for (const auto& [cat, ch] : map.channels()) {
    auto& arr = channels[cat] = nlohmann::ordered_json::array();
    for (const auto& [cell, conf] : ch) arr.push_back({cell.row, cell.col, conf});
  }
  return out;
}

}  // namespace eqa::mapper

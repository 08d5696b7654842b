// Shared test helpers: fixture access, scene builders and brute-force
// reference implementations used as oracles by the property tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqa/eqa.hpp"

namespace eqa::test {

inline std::filesystem::path source_dir() { return EQA_SOURCE_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline world::GridScene load_fixture(const std::string& name) {
  return world::load_scene(read_text(source_dir() / "fixtures" / "scenes" / (name + ".json")), name);
}

inline world::GridScene load_fixture_text(const std::string& text) { return world::load_scene(text, "inline"); }

// Scene straight from '#'/'.' rows, with no objects or questions.
inline world::GridScene ascii_scene(const std::vector<std::string>& rows, double cell = 0.05) {
  world::GridScene s;
  s.id = "ascii";
  s.frame = {static_cast<int>(rows.at(0).size()), static_cast<int>(rows.size()), cell};
  for (const auto& r : rows) {
    for (char ch : r) s.cells.push_back(ch == '#' ? world::CellKind::obstacle : world::CellKind::free);
  }
  s.rebuild_masks();
  return s;
}

inline world::ObjectInstance rect_object(const std::string& id, const std::string& category, int r0, int c0, int r1,
                                         int c1, double cell = 0.05) {
  world::ObjectInstance o;
  o.id = id;
  o.category = category;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) o.footprint.push_back({r, c});
  }
  o.center = {(c0 + c1 + 1) * 0.5 * cell, (r0 + r1 + 1) * 0.5 * cell};
  return o;
}

// Walled box of the given size in cells with a free interior.
inline std::vector<std::string> open_room(int w, int h) {
  std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '.'));
  for (int c = 0; c < w; ++c) rows.front()[c] = rows.back()[c] = '#';
  for (auto& r : rows) r.front() = r.back() = '#';
  return rows;
}

inline AgentPose cell_pose(Cell c, double theta_deg = 0.0, double cell = 0.05) {
  return {(c.col + 0.5) * cell, (c.row + 0.5) * cell, wrap_two_pi(deg_to_rad(theta_deg))};
}

// Random scene with scattered obstacle cells and a few rectangular objects;
// used by the sensor property tests.
inline world::GridScene random_scene(std::mt19937_64& rng, int w, int h, double obstacle_p, int n_objects) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '.'));
  for (auto& r : rows) {
    for (auto& ch : r) ch = u(rng) < obstacle_p ? '#' : '.';
  }
  auto s = ascii_scene(rows);
  std::set<Cell> used;
  for (int k = 0; k < n_objects; ++k) {
    const int ow = 1 + static_cast<int>(rng() % 4), oh = 1 + static_cast<int>(rng() % 4);
    const int r0 = static_cast<int>(rng() % static_cast<std::uint64_t>(h - oh));
    const int c0 = static_cast<int>(rng() % static_cast<std::uint64_t>(w - ow));
    auto o = rect_object("o" + std::to_string(k), k % 2 ? "chair" : "table", r0, c0, r0 + oh - 1, c0 + ow - 1);
    bool clash = false;
    for (const auto& c : o.footprint) clash = clash || used.count(c);
    if (clash) continue;
    for (const auto& c : o.footprint) {
      used.insert(c);
      s.cells[s.frame.index(c)] = world::CellKind::free;
    }
    s.objects.push_back(std::move(o));
  }
  s.rebuild_masks();
  return s;
}

// ---------------------------------------------------------------------------
// Exact geometry
// ---------------------------------------------------------------------------

// Liang-Barsky: parameter interval [t0, t1] of p + t*d inside the closed box,
// or nullopt when the line misses it.
inline std::optional<std::pair<double, double>> clip_box(Point p, Point d, double x0, double y0, double x1, double y1) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  const double pv[4] = {-d.x, d.x, -d.y, d.y};
  const double qv[4] = {p.x - x0, x1 - p.x, p.y - y0, y1 - p.y};
  for (int i = 0; i < 4; ++i) {
    if (pv[i] == 0.0) {
      if (qv[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = qv[i] / pv[i];
    if (pv[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  if (t0 > t1) return std::nullopt;
  return std::pair{t0, t1};
}

// Closest entry distance of the ray into any solid cell (solid cells include
// out-of-bounds, so the frame border also counts), clamped to max_range.
inline double brute_ray_hit(const world::GridScene& s, Point o, double angle, double max_range) {
  const Point d{std::cos(angle), std::sin(angle)};
  const double cs = s.frame.cell_size;
  double best = max_range;
  for (int r = -1; r <= s.frame.height; ++r) {
    for (int c = -1; c <= s.frame.width; ++c) {
      if (!s.solid({r, c})) continue;
      const auto iv = clip_box(o, d, c * cs, r * cs, (c + 1) * cs, (r + 1) * cs);
      if (!iv || iv->second < 0.0) continue;
      best = std::min(best, std::max(0.0, iv->first));
    }
  }
  // beyond the frame everything is solid
  const auto in = clip_box(o, d, 0.0, 0.0, s.frame.width * cs, s.frame.height * cs);
  if (in) best = std::min(best, in->second);
  return best;
}

// Whether the open segment origin -> center(target) crosses the interior of
// any solid cell other than the target's own object.
inline bool brute_line_of_sight(const world::GridScene& s, Point o, Cell target) {
  const int self = s.owner(target);
  const Point tc = s.frame.center_of(target);
  const Point d{tc.x - o.x, tc.y - o.y};
  const double cs = s.frame.cell_size;
  for (int r = 0; r < s.frame.height; ++r) {
    for (int c = 0; c < s.frame.width; ++c) {
      const Cell cell{r, c};
      if (cell == target || !s.solid(cell)) continue;
      if (self >= 0 && s.owner(cell) == self) continue;
      const auto iv = clip_box(o, d, c * cs, r * cs, (c + 1) * cs, (r + 1) * cs);
      if (!iv) continue;
      const double a = std::max(0.0, iv->first), b = std::min(1.0, iv->second);
      if (b - a > 1e-12) return false;
    }
  }
  return true;
}

// Contact ids by exhaustive per-cell visibility.
inline std::set<std::string> brute_contacts(const world::GridScene& s, const AgentPose& pose, const SensorConfig& cfg) {
  std::set<std::string> out;
  const double half = deg_to_rad(cfg.fov_deg) / 2.0;
  for (const auto& obj : s.objects) {
    for (const auto& cell : obj.footprint) {
      const Point cc = s.frame.center_of(cell);
      const double dx = cc.x - pose.x, dy = cc.y - pose.y;
      if (std::hypot(dx, dy) > cfg.max_range_m) continue;
      double b = std::atan2(dy, dx) - pose.theta;
      while (b > std::numbers::pi) b -= 2 * std::numbers::pi;
      while (b <= -std::numbers::pi) b += 2 * std::numbers::pi;
      if (std::abs(b) > half) continue;
      if (brute_line_of_sight(s, pose.position(), cell)) {
        out.insert(obj.id);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graph search oracles
// ---------------------------------------------------------------------------

// Bellman-Ford relaxation over the 8-connected grid until a fixed point.
// cost(c) < 0 marks c impassable; otherwise it multiplies the step length.
template <class Cost>
std::vector<double> bellman_ford(int w, int h, double cell, Cell src, Cost&& cost) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(w * h), inf);
  dist[static_cast<std::size_t>(src.row * w + src.col)] = 0.0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double here = dist[static_cast<std::size_t>(r * w + c)];
        if (!std::isfinite(here)) continue;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (!dr && !dc) continue;
            const int nr = r + dr, nc = c + dc;
            if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
            const double m = cost(Cell{nr, nc});
            if (m < 0.0) continue;
            const double step = (dr && dc ? std::numbers::sqrt2 : 1.0) * cell * m;
            auto& slot = dist[static_cast<std::size_t>(nr * w + nc)];
            if (here + step < slot - 1e-15) {
              slot = here + step;
              changed = true;
            }
          }
        }
      }
    }
  }
  return dist;
}

// Cost of walking a path cell by cell; nullopt if it is not a valid
// 8-connected path over passable cells.
template <class Cost>
std::optional<double> path_cost(const std::vector<Cell>& path, double cell, Cost&& cost) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int dr = std::abs(path[i].row - path[i - 1].row), dc = std::abs(path[i].col - path[i - 1].col);
    if (dr > 1 || dc > 1 || (dr == 0 && dc == 0)) return std::nullopt;
    const double m = cost(path[i]);
    if (m < 0.0) return std::nullopt;
    total += (dr && dc ? std::numbers::sqrt2 : 1.0) * cell * m;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

struct RandomMap {
  std::vector<std::string> glyphs;  // '?', '.', '#'
  mapper::SemanticMap map;
};

inline RandomMap random_partial_map(std::mt19937_64& rng, int w, int h) {
  RandomMap out{{}, mapper::SemanticMap(GridFrame{w, h, 0.05})};
  // per-map mix so some maps are mostly known and some mostly unknown
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p_unknown = u(rng), p_obstacle = 0.3 * u(rng);
  for (int r = 0; r < h; ++r) {
    std::string row;
    for (int c = 0; c < w; ++c) {
      const double x = u(rng);
      if (x < p_unknown) {
        row.push_back('?');
      } else if (x < p_unknown + (1 - p_unknown) * p_obstacle) {
        row.push_back('#');
        out.map.mark_obstacle({r, c});
      } else {
        row.push_back('.');
        out.map.mark_free({r, c});
      }
    }
    out.glyphs.push_back(std::move(row));
  }
  return out;
}

// Frontier set straight from the glyph grid.
inline std::set<Cell> brute_frontiers(const std::vector<std::string>& g) {
  std::set<Cell> out;
  const int h = static_cast<int>(g.size()), w = static_cast<int>(g[0].size());
  auto unknown = [&](int r, int c) { return r >= 0 && c >= 0 && r < h && c < w && g[r][c] == '?'; };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (g[r][c] == '.' && (unknown(r - 1, c) || unknown(r + 1, c) || unknown(r, c - 1) || unknown(r, c + 1))) {
        out.insert({r, c});
      }
    }
  }
  return out;
}

// Violations of the noiseless-sensing contract: mapped obstacles must sit
// within one cell of a true solid cell, mapped free cells must be free.
inline int map_violations(const mapper::SemanticMap& m, const world::GridScene& s) {
  int bad = 0;
  const auto& f = m.frame();
  for (int r = 0; r < f.height; ++r) {
    for (int c = 0; c < f.width; ++c) {
      const auto st = m.state({r, c});
      if (st == mapper::CellState::free && s.solid({r, c})) ++bad;
      if (st == mapper::CellState::obstacle) {
        bool near = false;
        for (int dr = -1; dr <= 1 && !near; ++dr) {
          for (int dc = -1; dc <= 1 && !near; ++dc) near = s.solid({r + dr, c + dc});
        }
        if (!near) ++bad;
      }
    }
  }
  return bad;
}

}  // namespace eqa::test

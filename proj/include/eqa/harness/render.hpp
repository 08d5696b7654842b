#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "eqa/harness/episode.hpp"
#include "eqa/mapper/semantic_map.hpp"

namespace eqa::harness {

// Overlay glyphs, drawn in this order over the map text (later wins).
inline constexpr char kGlyphFrontier = '~';
inline constexpr char kGlyphTarget = 'x';
inline constexpr char kGlyphPath = '*';
inline constexpr char kGlyphGoal = '+';
inline constexpr char kGlyphAgent = '@';

struct Frame {
  int step = 0;
  std::vector<std::string> lines;
  std::vector<Point> path;  // pose after each forward action up to `step`
};

inline Frame render_frame(const Trace& trace, const mapper::SemanticMap& map, int up_to_step) {
  Frame f;
  f.step = up_to_step;
  f.lines = mapper::map_to_text(map);
  const auto& frame = map.frame();
  auto put = [&](Cell c, char g) {
    if (frame.in_bounds(c)) f.lines[c.row][c.col] = g;
  };

  for (const auto& c : mapper::detect_frontiers(map)) put(c, kGlyphFrontier);
  if (const auto it = map.channels().find(trace.header.target_category); it != map.channels().end()) {
    for (const auto& [c, conf] : it->second) put(c, kGlyphTarget);
  }

  AgentPose agent = trace.header.start;
  const StepRecord* last = nullptr;
  for (std::size_t i = 0; i < trace.steps.size() && trace.steps[i].step <= up_to_step; ++i) {
    const auto& s = trace.steps[i];
    last = &s;
    agent = s.pose;
    if (s.action == Action::forward) {
      // the next record's pose is where this action left the agent
      const AgentPose after = i + 1 < trace.steps.size() ? trace.steps[i + 1].pose : s.pose;
      f.path.push_back(after.position());
      if (s.step < up_to_step) agent = after;
    }
  }
  for (const auto& p : f.path) put(frame.cell_of(p), kGlyphPath);
  if (last && last->goal) put(*last->goal, kGlyphGoal);
  put(frame.cell_of(agent.position()), kGlyphAgent);
  return f;
}

// Final frame on the final map, plus one frame per stored map snapshot.
inline std::vector<Frame> render_trace(const Trace& trace, const mapper::SemanticMap& final_map,
                                       const std::vector<std::pair<int, mapper::SemanticMap>>& snapshots = {}) {
  std::vector<Frame> frames;
  for (const auto& [step, map] : snapshots) frames.push_back(render_frame(trace, map, step));
  const int last = trace.steps.empty() ? 0 : trace.steps.back().step;
  frames.push_back(render_frame(trace, final_map, last));
  return frames;
}

inline std::string frame_to_string(const Frame& f) {
  std::string out;
  for (const auto& l : f.lines) {
    out += l;
    out += '\n';
  }
  return out;
}

// Binary PPM (P6), `scale` pixels per cell.
inline void write_ppm(const Frame& f, const std::string& path, int scale = 4) {
  const int h = static_cast<int>(f.lines.size());
  const int w = h ? static_cast<int>(f.lines[0].size()) : 0;
  auto color = [](char g) -> std::array<std::uint8_t, 3> {
    switch (g) {
      case '?': return {96, 96, 96};
      case '.': return {235, 235, 235};
      case '#': return {20, 20, 20};
      case kGlyphFrontier: return {80, 160, 255};
      case kGlyphTarget: return {230, 40, 40};
      case kGlyphPath: return {40, 190, 60};
      case kGlyphGoal: return {250, 200, 0};
      case kGlyphAgent: return {200, 0, 200};
      default: return {150, 110, 60};  // other semantic categories
    }
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "P6\n" << w * scale << ' ' << h * scale << "\n255\n";
  for (int r = 0; r < h; ++r) {
    for (int sy = 0; sy < scale; ++sy) {
      for (int c = 0; c < w; ++c) {
        const auto rgb = color(f.lines[r][c]);
        for (int sx = 0; sx < scale; ++sx) out.write(reinterpret_cast<const char*>(rgb.data()), 3);
      }
    }
  }
}

}  // namespace eqa::harness

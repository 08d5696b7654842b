#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqa/common.hpp"
#include "eqa/grid_search.hpp"
#include "eqa/oracles/language.hpp"
#include "eqa/world/scene.hpp"

namespace eqa::harness {

// Layout: an outer wall, a row of rooms on top, a full-width corridor, a row
// of rooms below. Each room opens onto the corridor through one door.
struct SuiteParams {
  int width = 160;
  int height = 120;
  double cell_size = 0.05;
  int wall = 2;
  int corridor = 20;
  int door = 18;
  int min_objects = 3;
  int max_objects = 8;
  double distractor_probability = 0.5;
  double view_gap_m = 0.35;  // end pose distance in front of the target's near edge
};

namespace suite_detail {

inline constexpr std::array<const char*, 8> kPalette{"red", "blue", "green", "yellow", "white", "black", "brown", "gray"};
inline constexpr std::array<const char*, 6> kRoomLabels{"kitchen", "bedroom", "bathroom", "office", "living room",
                                                       "dining room"};
inline constexpr std::array<const char*, 8> kLarge{"chair", "table", "sofa", "cabinet", "desk", "dresser", "bench",
                                                  "bed"};
inline constexpr std::array<const char*, 4> kSupports{"table", "desk", "cabinet", "dresser"};
inline constexpr std::array<const char*, 4> kSmall{"vase", "lamp", "plant", "box"};

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
inline int between(Rng& rng, int lo, int hi) { return lo + pick(rng, hi - lo + 1); }
inline bool chance(Rng& rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

enum class Side : std::uint8_t { far, left, right };

struct RoomBox {
  world::Room room;
  bool top = true;  // door on the bottom wall when true
  int door_c0 = 0;  // first door column
};

struct Placed {
  world::ObjectInstance obj;
  int r0, c0, r1, c1;
  Side side;
  int room;
};

class Builder {
 public:
  Builder(const SuiteParams& p, Rng& rng) : p_(p), rng_(rng) {}

  std::vector<RoomBox> rooms;
  std::vector<Placed> placed;
  std::vector<std::string> grid;

  void layout() {
    grid.assign(p_.height, std::string(p_.width, '#'));
    const int w = p_.wall;
    const int top_r0 = w;
    const int corr_r0 = (p_.height - p_.corridor) / 2;
    const int corr_r1 = corr_r0 + p_.corridor - 1;
    const int top_r1 = corr_r0 - w - 1;
    const int bot_r0 = corr_r1 + w + 1;
    const int bot_r1 = p_.height - w - 1;
    carve(corr_r0, w, corr_r1, p_.width - w - 1);

    std::vector<int> labels(kRoomLabels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i);
    std::shuffle(labels.begin(), labels.end(), rng_);
    int next_label = 0;
    for (bool top : {true, false}) {
      const int n = between(rng_, 2, 3);
      const int inner = p_.width - 2 * w - (n - 1) * w;
      int c = w;
      for (int i = 0; i < n; ++i) {
        const int rw = inner / n + (i < inner % n ? 1 : 0);
        RoomBox b;
        b.top = top;
        b.room = {kRoomLabels[labels[next_label++ % labels.size()]], top ? top_r0 : bot_r0, c, top ? top_r1 : bot_r1,
                  c + rw - 1};
        carve(b.room.r0, b.room.c0, b.room.r1, b.room.c1);
        b.door_c0 = between(rng_, b.room.c0 + 4, b.room.c1 - 3 - p_.door);
        const int dr0 = top ? top_r1 + 1 : corr_r1 + 1;
        carve(dr0, b.door_c0, dr0 + w - 1, b.door_c0 + p_.door - 1);
        rooms.push_back(b);
        c += rw + w;
      }
    }
  }

  // Attempts to put a rectangle against a wall of `room`; cells are
  // checked against earlier placements (with `gap` clearance) and doors.
  // `inset` moves the rectangle that many cells off the wall.
  std::optional<Placed> place(int room, Side side, int along, int depth, int gap = 4,
                              std::optional<int> fixed_start = std::nullopt, int inset = 0) {
    const auto& b = rooms[room];
    const auto& R = b.room;
    int r0 = 0, c0 = 0, r1 = 0, c1 = 0;
    const int span_lo = side == Side::far ? R.c0 + 3 : R.r0 + 3;
    const int span_hi = (side == Side::far ? R.c1 : R.r1) - 3 - along + 1;
    if (span_hi < span_lo) return std::nullopt;
    const int start = fixed_start ? *fixed_start : between(rng_, span_lo, span_hi);
    if (start < span_lo || start > span_hi) return std::nullopt;
    switch (side) {
      case Side::far:
        c0 = start;
        c1 = start + along - 1;
        if (b.top) {
          r0 = R.r0 + inset;
          r1 = r0 + depth - 1;
        } else {
          r1 = R.r1 - inset;
          r0 = r1 - depth + 1;
        }
        break;
      case Side::left:
      case Side::right:
        r0 = start;
        r1 = start + along - 1;
        if (side == Side::left) {
          c0 = R.c0 + inset;
          c1 = c0 + depth - 1;
        } else {
          c1 = R.c1 - inset;
          c0 = c1 - depth + 1;
        }
        break;
    }
    // keep the door approach clear
    const int door_band_r0 = b.top ? R.r1 - 14 : R.r0;
    const int door_band_r1 = b.top ? R.r1 : R.r0 + 14;
    if (r1 >= door_band_r0 && r0 <= door_band_r1 && c1 >= b.door_c0 - 6 && c0 <= b.door_c0 + p_.door + 5) {
      return std::nullopt;
    }
    for (const auto& o : placed) {
      if (r0 - gap <= o.r1 && r1 + gap >= o.r0 && c0 - gap <= o.c1 && c1 + gap >= o.c0) return std::nullopt;
    }
    Placed out{{}, r0, c0, r1, c1, side, room};
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) out.obj.footprint.push_back({r, c});
    }
    out.obj.center = {(c0 + c1 + 1) * 0.5 * p_.cell_size, (r0 + r1 + 1) * 0.5 * p_.cell_size};
    return out;
  }

  std::optional<Placed> place_random(int room, int along, int depth, int tries = 30) {
    for (int t = 0; t < tries; ++t) {
      const auto side = static_cast<Side>(pick(rng_, 3));
      if (auto p = place(room, side, along, depth)) return p;
    }
    return std::nullopt;
  }

  std::string add(Placed p, std::string category, std::string color) {
    p.obj.id = "obj" + std::to_string(placed.size());
    p.obj.category = std::move(category);
    p.obj.attributes["color"] = std::move(color);
    placed.push_back(std::move(p));
    return placed.back().obj.id;
  }

  // Pose in front of the placed rectangle(s), facing the wall they stand on.
  AgentPose view_pose(const Placed& first, const Placed& last) const {
    const double s = p_.cell_size;
    const auto& b = rooms[first.room];
    Point p;
    double theta = 0.0;
    switch (first.side) {
      case Side::far:
        p.x = (std::min(first.c0, last.c0) + std::max(first.c1, last.c1) + 1) * 0.5 * s;
        if (b.top) {
          p.y = (first.r1 + 1) * s + p_.view_gap_m;
          theta = 1.5 * kPi;
        } else {
          p.y = first.r0 * s - p_.view_gap_m;
          theta = 0.5 * kPi;
        }
        break;
      case Side::left:
      case Side::right:
        p.y = (std::min(first.r0, last.r0) + std::max(first.r1, last.r1) + 1) * 0.5 * s;
        if (first.side == Side::left) {
          p.x = (first.c1 + 1) * s + p_.view_gap_m;
          theta = kPi;
        } else {
          p.x = first.c0 * s - p_.view_gap_m;
          theta = 0.0;
        }
        break;
    }
    // snap to the containing cell's center
    const Cell c{static_cast<int>(std::floor(p.y / s)), static_cast<int>(std::floor(p.x / s))};
    return {(c.col + 0.5) * s, (c.row + 0.5) * s, theta};
  }

 private:
  void carve(int r0, int c0, int r1, int c1) {
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) grid[r][c] = '.';
    }
  }

  const SuiteParams& p_;
  Rng& rng_;
};

inline std::string pick_other(Rng& rng, const auto& pool, const std::vector<std::string>& exclude) {
  for (;;) {
    std::string c = pool[pick(rng, static_cast<int>(pool.size()))];
    if (std::find(exclude.begin(), exclude.end(), c) == exclude.end()) return c;
  }
}

}  // namespace suite_detail

// Builds one scene with a single QA item. The question type cycles with
// `index` over color, room, location, what_is, count. Returns nullopt when a
// draw cannot be placed; the caller redraws.
inline std::optional<nlohmann::ordered_json> try_generate_scene(int index, suite_detail::Rng& rng,
                                                                const SuiteParams& p = {}) {
  using namespace suite_detail;
  using world::QuestionType;
  Builder b(p, rng);
  b.layout();
  const auto qtype = static_cast<QuestionType>(index % 5);
  const int n_rooms = static_cast<int>(b.rooms.size());
  const int target_room = pick(rng, n_rooms);
  const std::string room_label = b.rooms[target_room].room.label;
  const std::string color = kPalette[pick(rng, static_cast<int>(kPalette.size()))];

  std::string category;
  std::string question, answer;
  std::vector<std::size_t> group;  // indices into b.placed of the referenced instances
  std::vector<std::string> used_categories;

  if (qtype == QuestionType::what_is) {
    category = kSupports[pick(rng, static_cast<int>(kSupports.size()))];
    // narrow support, so the item beside it stays in view while facing it
    const int along = between(rng, 8, 10), depth = between(rng, 8, 10);
    auto sup = b.place_random(target_room, along, depth);
    if (!sup) return std::nullopt;
    // small item touching the support's side, level with its front face
    const int small = 4;
    const Side side = sup->side;
    const int start = side == Side::far ? sup->c1 + 1 : sup->r1 + 1;
    auto item = b.place(target_room, side, small, small, 0, start, depth - small);
    if (!item) return std::nullopt;
    const std::string sup_id = b.add(*sup, category, color);
    group.push_back(b.placed.size() - 1);
    const std::string small_cat = kSmall[pick(rng, static_cast<int>(kSmall.size()))];
    b.add(*item, small_cat, pick_other(rng, kPalette, {color}));
    b.placed.back().obj.attributes["on"] = sup_id;
    used_categories = {category, small_cat};
    question = "What is on the " + category + " in the " + room_label + "?";
    answer = small_cat;
  } else if (qtype == QuestionType::count) {
    category = kSmall[pick(rng, static_cast<int>(kSmall.size()))];
    const int k = between(rng, 1, 2);
    const int size = 6;
    auto first = b.place_random(target_room, size, size);
    if (!first) return std::nullopt;
    const Side side = first->side;
    b.add(*first, category, color);
    group.push_back(b.placed.size() - 1);
    if (k == 2) {
      const int start = (side == Side::far ? first->c1 : first->r1) + 4;
      auto second = b.place(target_room, side, size, size, 2, start);
      if (!second) return std::nullopt;
      b.add(*second, category, pick_other(rng, kPalette, {}));
      group.push_back(b.placed.size() - 1);
    }
    used_categories = {category};
    question = "How many " + oracles::pluralize(category) + " are in the " + room_label + "?";
    answer = std::to_string(k);
  } else {
    category = kLarge[pick(rng, static_cast<int>(kLarge.size()))];
    auto t = b.place_random(target_room, between(rng, 10, 16), between(rng, 8, 12));
    if (!t) return std::nullopt;
    b.add(*t, category, color);
    group.push_back(b.placed.size() - 1);
    used_categories = {category};
    const bool plural = chance(rng, 0.5);
    const std::string noun = plural ? oracles::pluralize(category) : category;
    const std::string be = plural ? "are" : "is";
    switch (qtype) {
      case QuestionType::color:
        question = "What color " + be + " the " + noun + " in the " + room_label + "?";
        answer = color;
        break;
      case QuestionType::room:
        question = "What room " + be + " the " + color + " " + noun + " located in?";
        answer = room_label;
        break;
      default:
        question = "Where " + be + " the " + color + " " + noun + "?";
        answer = "room " + room_label;
        break;
    }
  }

  const AgentPose end = b.view_pose(b.placed[group.front()], b.placed[group.back()]);
  const std::string target_id = b.placed[group.front()].obj.id;

  const int n_objects = between(rng, p.min_objects, p.max_objects);
  if (chance(rng, p.distractor_probability) && static_cast<int>(b.placed.size()) < n_objects && n_rooms > 1) {
    int other = pick(rng, n_rooms - 1);
    if (other >= target_room) ++other;
    const auto& ref = b.placed[group.front()];
    const int along = std::max(ref.c1 - ref.c0, ref.r1 - ref.r0) + 1;
    const int depth = std::min(ref.c1 - ref.c0, ref.r1 - ref.r0) + 1;
    if (auto d = b.place_random(other, along, depth)) b.add(*d, category, pick_other(rng, kPalette, {color}));
  }
  for (int guard = 0; static_cast<int>(b.placed.size()) < n_objects && guard < 60; ++guard) {
    const int room = pick(rng, n_rooms);
    if (room == target_room && qtype == QuestionType::count) continue;
    const std::string cat = pick_other(rng, std::array<const char*, 12>{"chair", "table", "sofa", "cabinet", "desk",
                                                                        "dresser", "bench", "bed", "vase", "lamp",
                                                                        "plant", "box"},
                                       used_categories);
    auto f = b.place_random(room, between(rng, 6, 16), between(rng, 6, 10));
    if (f) b.add(*f, cat, kPalette[pick(rng, static_cast<int>(kPalette.size()))]);
  }

  // the end pose must see a clear corridor back to every door
  std::vector<std::string> grid = b.grid;
  for (const auto& pl : b.placed) {
    for (const auto& c : pl.obj.footprint) grid[c.row][c.col] = '#';
  }
  const GridFrame frame{p.width, p.height, p.cell_size};
  auto open = [&](Cell c) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell n{c.row + dr, c.col + dc};
        if (!frame.in_bounds(n) || grid[n.row][n.col] == '#') return false;
      }
    }
    return true;
  };
  const Cell end_cell = frame.cell_of(end.position());
  if (!open(end_cell)) return std::nullopt;
  const auto field = distance_field(frame, end_cell, [&](Cell c) { return open(c) ? 1.0 : -1.0; });
  for (const auto& rb : b.rooms) {
    const Cell door{rb.top ? rb.room.r1 + 1 : rb.room.r0 - 1, rb.door_c0 + p.door / 2};
    if (!std::isfinite(field[frame.index(door)])) return std::nullopt;
  }

  char id[32];
  std::snprintf(id, sizeof id, "suite_%03d", index);
  nlohmann::ordered_json doc;
  doc["id"] = id;
  doc["cell_size"] = p.cell_size;
  doc["grid"] = b.grid;
  doc["objects"] = nlohmann::ordered_json::array();
  for (const auto& pl : b.placed) {
    nlohmann::ordered_json o;
    o["id"] = pl.obj.id;
    o["category"] = pl.obj.category;
    o["attributes"] = pl.obj.attributes;
    o["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : pl.obj.footprint) o["cells"].push_back({c.row, c.col});
    o["center"] = {pl.obj.center.x, pl.obj.center.y};
    doc["objects"].push_back(std::move(o));
  }
  doc["rooms"] = nlohmann::ordered_json::array();
  for (const auto& rb : b.rooms) {
    doc["rooms"].push_back({{"label", rb.room.label}, {"rect", {rb.room.r0, rb.room.c0, rb.room.r1, rb.room.c1}}});
  }
  const int corr_r0 = (p.height - p.corridor) / 2;
  doc["rooms"].push_back(
      {{"label", "hallway"}, {"rect", {corr_r0, p.wall, corr_r0 + p.corridor - 1, p.width - p.wall - 1}}});
  doc["qa"] = nlohmann::ordered_json::array();
  doc["qa"].push_back({{"question", question},
                       {"answer", answer},
                       {"target_id", target_id},
                       {"end_pose", {end.x, end.y, rad_to_deg(end.theta)}},
                       {"type", std::string(world::to_string(qtype))}});
  return doc;
}

// Seeded suite of `n` scenes, every one round-tripped through load_scene.
inline std::vector<nlohmann::ordered_json> generate_suite_json(int n, std::uint64_t seed, const SuiteParams& p = {}) {
  std::vector<nlohmann::ordered_json> out;
  for (int i = 0; i < n; ++i) {
    suite_detail::Rng rng(seed * 0x100000001b3ULL + static_cast<std::uint64_t>(i));
    for (int attempt = 0;; ++attempt) {
      if (attempt > 200) throw Error("gen-suite: could not place scene " + std::to_string(i));
      auto doc = try_generate_scene(i, rng, p);
      if (!doc) continue;
      world::load_scene(doc->dump());
      out.push_back(std::move(*doc));
      break;
    }
  }
  return out;
}

inline std::vector<world::GridScene> generate_suite(int n, std::uint64_t seed, const SuiteParams& p = {}) {
  std::vector<world::GridScene> scenes;
  for (const auto& doc : generate_suite_json(n, seed, p)) scenes.push_back(world::load_scene(doc.dump()));
  return scenes;
}

}  // namespace eqa::harness

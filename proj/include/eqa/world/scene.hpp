#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eqa/common.hpp"
#include "eqa/grid_search.hpp"

namespace eqa::world {

enum class CellKind : std::uint8_t { free, obstacle };

enum class QuestionType : std::uint8_t { color, room, location, what_is, count };

inline std::string_view to_string(QuestionType t) {
  switch (t) {
    case QuestionType::color: return "color";
    case QuestionType::room: return "room";
    case QuestionType::location: return "location";
    case QuestionType::what_is: return "what_is";
    case QuestionType::count: return "count";
  }
  return "color";
}

inline std::optional<QuestionType> question_type_from(std::string_view s) {
  for (auto t : {QuestionType::color, QuestionType::room, QuestionType::location, QuestionType::what_is,
                 QuestionType::count}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

struct ObjectInstance {
  std::string id;
  std::string category;
  std::map<std::string, std::string> attributes;
  std::vector<Cell> footprint;
  Point center;
};

// Inclusive cell rectangle.
struct Room {
  std::string label;
  int r0 = 0, c0 = 0, r1 = 0, c1 = 0;

  bool contains(Cell c) const { return c.row >= r0 && c.row <= r1 && c.col >= c0 && c.col <= c1; }
};

struct QAItem {
  std::string question;
  std::string answer;
  std::string target_instance_id;
  AgentPose end_pose;
  QuestionType question_type = QuestionType::color;
};

// Ground-truth world. Immutable once built; call rebuild_masks() after
// editing cells or objects by hand.
class GridScene {
 public:
  std::string id;
  GridFrame frame;
  std::vector<CellKind> cells;
  std::vector<ObjectInstance> objects;
  std::vector<Room> rooms;
  std::vector<QAItem> qa_items;

  void rebuild_masks() {
    solid_.assign(frame.size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) solid_[i] = cells[i] == CellKind::obstacle ? 1 : 0;
    owner_.assign(frame.size(), -1);
    for (std::size_t k = 0; k < objects.size(); ++k) {
      for (const auto& c : objects[k].footprint) {
        if (!frame.in_bounds(c)) continue;
        solid_[frame.index(c)] = 1;
        owner_[frame.index(c)] = static_cast<int>(k);
      }
    }
    traversable_.assign(frame.size(), 0);
    for (int r = 0; r < frame.height; ++r) {
      for (int c = 0; c < frame.width; ++c) {
        bool ok = !solid_[frame.index({r, c})];
        for (int dr = -1; ok && dr <= 1; ++dr) {
          for (int dc = -1; ok && dc <= 1; ++dc) {
            const Cell n{r + dr, c + dc};
            ok = frame.in_bounds(n) && !solid_[frame.index(n)];
          }
        }
        traversable_[frame.index({r, c})] = ok ? 1 : 0;
      }
    }
  }

  // Obstacle cell or object footprint; out-of-bounds counts as solid.
  bool solid(Cell c) const { return !frame.in_bounds(c) || solid_[frame.index(c)] != 0; }

  bool is_free(Cell c) const { return !solid(c); }

  // Index into `objects` of the footprint covering c, or -1.
  int owner(Cell c) const { return frame.in_bounds(c) ? owner_[frame.index(c)] : -1; }

  // Free and not within the 1-cell obstacle inflation.
  bool traversable(Cell c) const { return frame.in_bounds(c) && traversable_[frame.index(c)] != 0; }

  bool traversable(Point p) const { return traversable(frame.cell_of(p)); }

  const ObjectInstance* find_object(std::string_view oid) const {
    for (const auto& o : objects) {
      if (o.id == oid) return &o;
    }
    return nullptr;
  }

  // Label of the first room whose rectangle contains p, if any.
  std::optional<std::string> room_at(Point p) const {
    const Cell c = frame.cell_of(p);
    for (const auto& r : rooms) {
      if (r.contains(c)) return r.label;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::uint8_t> solid_;
  std::vector<std::uint8_t> traversable_;
  std::vector<int> owner_;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, std::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string(where) + ": missing field \"" + key + "\"");
  }
  return obj.at(key);
}

template <class T>
T get_as(const nlohmann::json& j, std::string_view where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(where) + ": " + e.what());
  }
}

// Geodesic from `start` through free cells to the nearest footprint cell of obj.
inline double geodesic_to_footprint(const GridScene& scene, Cell start, const ObjectInstance& obj) {
  std::set<Cell> targets(obj.footprint.begin(), obj.footprint.end());
  const auto field = distance_field(scene.frame, start, [&](Cell c) {
    if (targets.count(c)) return 1.0;
    return scene.is_free(c) ? 1.0 : -1.0;
  });
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : obj.footprint) {
    if (scene.frame.in_bounds(c)) best = std::min(best, field[scene.frame.index(c)]);
  }
  return best;
}

}  // namespace detail

// Checks every GridScene invariant, throwing ValidationError naming the
// offending entity. Rebuilds the derived masks first.
inline void validate_scene(GridScene& scene) {
  scene.rebuild_masks();
  const auto& f = scene.frame;

  std::map<Cell, std::string> owner;
  std::set<std::string> ids;
  for (const auto& obj : scene.objects) {
    if (obj.id.empty()) throw ValidationError("object with empty id");
    if (!ids.insert(obj.id).second) throw ValidationError("duplicate object id " + obj.id);
    if (obj.category.empty()) throw ValidationError("object " + obj.id + " has empty category");
    if (obj.footprint.empty()) throw ValidationError("object " + obj.id + " has empty footprint");
    int rmin = obj.footprint[0].row, rmax = rmin, cmin = obj.footprint[0].col, cmax = cmin;
    for (const auto& c : obj.footprint) {
      if (!f.in_bounds(c)) {
        throw ValidationError("object " + obj.id + " footprint cell (" + std::to_string(c.row) + "," +
                              std::to_string(c.col) + ") out of bounds");
      }
      auto [it, fresh] = owner.emplace(c, obj.id);
      if (!fresh) {
        throw ValidationError("overlapping footprints " + it->second + " and " + obj.id + " at (" +
                              std::to_string(c.row) + "," + std::to_string(c.col) + ")");
      }
      rmin = std::min(rmin, c.row);
      rmax = std::max(rmax, c.row);
      cmin = std::min(cmin, c.col);
      cmax = std::max(cmax, c.col);
    }
    const double s = f.cell_size;
    const double eps = 1e-9;
    if (obj.center.x < cmin * s - eps || obj.center.x > (cmax + 1) * s + eps || obj.center.y < rmin * s - eps ||
        obj.center.y > (rmax + 1) * s + eps) {
      throw ValidationError("object " + obj.id + " center outside its footprint bounding box");
    }
  }

  bool any_free = false;
  for (int r = 0; r < f.height && !any_free; ++r) {
    for (int c = 0; c < f.width && !any_free; ++c) any_free = scene.is_free({r, c});
  }
  if (!any_free) throw ValidationError("scene has no free cell");

  for (const auto& room : scene.rooms) {
    if (room.r0 > room.r1 || room.c0 > room.c1 || !f.in_bounds({room.r0, room.c0}) ||
        !f.in_bounds({room.r1, room.c1})) {
      throw ValidationError("room " + room.label + " rectangle invalid");
    }
  }

  for (std::size_t i = 0; i < scene.qa_items.size(); ++i) {
    const auto& qa = scene.qa_items[i];
    const auto* target = scene.find_object(qa.target_instance_id);
    if (!target) throw ValidationError("dangling target " + qa.target_instance_id);
    const Cell end = f.cell_of(qa.end_pose.position());
    if (!scene.is_free(end)) {
      throw ValidationError("qa " + std::to_string(i) + " end pose is not on a free cell");
    }
    if (detail::geodesic_to_footprint(scene, end, *target) > 1.0 + 1e-9) {
      throw ValidationError("qa " + std::to_string(i) + " end pose unreachable within 1.0 m of " + target->id);
    }
  }
}

// Parses and validates a scene file (JSON, see README for the schema).
inline GridScene load_scene(std::string_view text, std::string scene_id = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scene: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scene: top level must be an object");

  GridScene scene;
  scene.id = doc.value("id", scene_id);
  if (scene.id.empty()) scene.id = scene_id;
  scene.frame.cell_size = detail::get_as<double>(detail::require(doc, "cell_size", "scene"), "cell_size");
  if (!(scene.frame.cell_size > 0.0)) throw ParseError("scene: cell_size must be positive");

  const auto& grid = detail::require(doc, "grid", "scene");
  if (!grid.is_array() || grid.empty()) throw ParseError("scene: grid must be a non-empty array of strings");
  scene.frame.height = static_cast<int>(grid.size());
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const std::string where = "grid row " + std::to_string(r);
    const auto row = detail::get_as<std::string>(grid[r], where);
    if (r == 0) {
      if (row.empty()) throw ParseError("grid row 0 is empty");
      scene.frame.width = static_cast<int>(row.size());
      scene.cells.reserve(scene.frame.size());
    } else if (static_cast<int>(row.size()) != scene.frame.width) {
      throw ParseError(where + " has length " + std::to_string(row.size()) + ", expected " +
                       std::to_string(scene.frame.width));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == '#') {
        scene.cells.push_back(CellKind::obstacle);
      } else if (row[c] == '.') {
        scene.cells.push_back(CellKind::free);
      } else {
        throw ParseError(where + " column " + std::to_string(c) + ": unexpected character '" + row[c] + "'");
      }
    }
  }

  if (doc.contains("objects")) {
    for (const auto& jo : doc.at("objects")) {
      ObjectInstance obj;
      obj.id = detail::get_as<std::string>(detail::require(jo, "id", "object"), "object id");
      const std::string where = "object " + obj.id;
      obj.category = detail::get_as<std::string>(detail::require(jo, "category", where), where);
      if (jo.contains("attributes")) {
        for (const auto& [k, v] : jo.at("attributes").items()) {
          obj.attributes[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
      for (const auto& jc : detail::require(jo, "cells", where)) {
        const auto rc = detail::get_as<std::vector<int>>(jc, where + " cells");
        if (rc.size() != 2) throw ParseError(where + ": cell must be [r, c]");
        obj.footprint.push_back({rc[0], rc[1]});
      }
      const auto ctr = detail::get_as<std::vector<double>>(detail::require(jo, "center", where), where);
      if (ctr.size() != 2) throw ParseError(where + ": center must be [x, y]");
      obj.center = {ctr[0], ctr[1]};
      scene.objects.push_back(std::move(obj));
    }
  }

  if (doc.contains("rooms")) {
    for (const auto& jr : doc.at("rooms")) {
      Room room;
      room.label = detail::get_as<std::string>(detail::require(jr, "label", "room"), "room label");
      const auto rect = detail::get_as<std::vector<int>>(detail::require(jr, "rect", "room " + room.label), "rect");
      if (rect.size() != 4) throw ParseError("room " + room.label + ": rect must be [r0, c0, r1, c1]");
      room.r0 = rect[0];
      room.c0 = rect[1];
      room.r1 = rect[2];
      room.c1 = rect[3];
      scene.rooms.push_back(std::move(room));
    }
  }

  if (doc.contains("qa")) {
    std::size_t i = 0;
    for (const auto& jq : doc.at("qa")) {
      const std::string where = "qa " + std::to_string(i++);
      QAItem qa;
      qa.question = detail::get_as<std::string>(detail::require(jq, "question", where), where);
      qa.answer = detail::get_as<std::string>(detail::require(jq, "answer", where), where);
      qa.target_instance_id = detail::get_as<std::string>(detail::require(jq, "target_id", where), where);
      const auto pose = detail::get_as<std::vector<double>>(detail::require(jq, "end_pose", where), where);
      if (pose.size() != 3) throw ParseError(where + ": end_pose must be [x, y, theta_deg]");
      qa.end_pose = {pose[0], pose[1], wrap_two_pi(deg_to_rad(pose[2]))};
      const auto type = detail::get_as<std::string>(detail::require(jq, "type", where), where);
      const auto qt = question_type_from(type);
      if (!qt) throw ParseError(where + ": unknown question type \"" + type + "\"");
      qa.question_type = *qt;
      scene.qa_items.push_back(std::move(qa));
    }
  }

  validate_scene(scene);
  return scene;
}

// Serializes to the scene file format; load_scene(to_json(s)) reproduces s.
inline nlohmann::ordered_json scene_to_json(const GridScene& scene) {
  nlohmann::ordered_json doc;
  if (!scene.id.empty()) doc["id"] = scene.id;
  doc["cell_size"] = scene.frame.cell_size;
  auto& grid = doc["grid"] = nlohmann::ordered_json::array();
  for (int r = 0; r < scene.frame.height; ++r) {
    std::string row(static_cast<std::size_t>(scene.frame.width), '.');
    for (int c = 0; c < scene.frame.width; ++c) {
      if (scene.cells[scene.frame.index({r, c})] == CellKind::obstacle) row[static_cast<std::size_t>(c)] = '#';
    }
    grid.push_back(row);
  }
  auto& objs = doc["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : scene.objects) {
    nlohmann::ordered_json jo;
    jo["id"] = o.id;
    jo["category"] = o.category;
    jo["attributes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : o.attributes) jo["attributes"][k] = v;
    auto& cells = jo["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : o.footprint) cells.push_back({c.row, c.col});
    jo["center"] = {o.center.x, o.center.y};
    objs.push_back(std::move(jo));
  }
  auto& rooms = doc["rooms"] = nlohmann::ordered_json::array();
  for (const auto& r : scene.rooms) {
    rooms.push_back({{"label", r.label}, {"rect", {r.r0, r.c0, r.r1, r.c1}}});
  }
  auto& qas = doc["qa"] = nlohmann::ordered_json::array();
  for (const auto& q : scene.qa_items) {
    nlohmann::ordered_json jq;
    jq["question"] = q.question;
    jq["answer"] = q.answer;
    jq["target_id"] = q.target_instance_id;
    jq["end_pose"] = {q.end_pose.x, q.end_pose.y, rad_to_deg(q.end_pose.theta)};
    jq["type"] = std::string(to_string(q.question_type));
    qas.push_back(std::move(jq));
  }
  return doc;
}

}  // namespace eqa::world

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eqa/common.hpp"
#include "eqa/world/scene.hpp"
#include "eqa/world/sensor.hpp"

namespace eqa::oracles {

// What a snapshot shows of one visible instance.
struct InstanceView {
  std::string id;
  std::string category;
  std::map<std::string, std::string> attributes;
  std::string room;  // label of the room containing the instance center, "" if none
  double visibility = 0.0;
  double bearing = 0.0;
  double range = 0.0;

  friend bool operator==(const InstanceView&, const InstanceView&) = default;
};

struct StructuredSnapshot {
  int step = 0;
  AgentPose pose;
  std::vector<double> rays;
  std::vector<InstanceView> instances;

  friend bool operator==(const StructuredSnapshot& a, const StructuredSnapshot& b) {
    return a.step == b.step && a.pose.x == b.pose.x && a.pose.y == b.pose.y && a.pose.theta == b.pose.theta &&
           a.rays == b.rays && a.instances == b.instances;
  }
};

// Opaque camera frame for real deployments.
struct EncodedImage {
  std::string mime = "image/png";
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const EncodedImage&, const EncodedImage&) = default;
};

using Snapshot = std::variant<StructuredSnapshot, EncodedImage>;

inline StructuredSnapshot make_snapshot(const world::GridScene& scene, const AgentPose& pose,
                                        const world::Observation& obs) {
  StructuredSnapshot s;
  s.step = obs.step_index;
  s.pose = pose;
  s.rays = obs.rays;
  for (const auto& c : obs.contacts) {
    const auto* obj = scene.find_object(c.instance_id);
    InstanceView v;
    v.id = c.instance_id;
    v.category = c.category;
    if (obj) {
      v.attributes = obj->attributes;
      v.room = scene.room_at(obj->center).value_or("");
    }
    v.visibility = c.visibility_fraction;
    v.bearing = c.bearing;
    v.range = c.range;
    s.instances.push_back(std::move(v));
  }
  return s;
}

inline nlohmann::ordered_json to_json(const StructuredSnapshot& s) {
  nlohmann::ordered_json j;
  j["step"] = s.step;
  j["pose"] = {s.pose.x, s.pose.y, s.pose.theta};
  j["rays"] = s.rays;
  auto& arr = j["instances"] = nlohmann::ordered_json::array();
  for (const auto& v : s.instances) {
    nlohmann::ordered_json jv;
    jv["id"] = v.id;
    jv["category"] = v.category;
    jv["attributes"] = nlohmann::ordered_json::object();
    for (const auto& [k, val] : v.attributes) jv["attributes"][k] = val;
    jv["room"] = v.room;
    jv["visibility"] = v.visibility;
    jv["bearing"] = v.bearing;
    jv["range"] = v.range;
    arr.push_back(std::move(jv));
  }
  return j;
}

template <class Json>
StructuredSnapshot snapshot_from_json(const Json& j) {
  StructuredSnapshot s;
  s.step = j.at("step").template get<int>();
  const auto pose = j.at("pose").template get<std::vector<double>>();
  if (pose.size() != 3) throw ParseError("snapshot: pose must be [x, y, theta]");
  s.pose = {pose[0], pose[1], pose[2]};
  if (j.contains("rays")) s.rays = j.at("rays").template get<std::vector<double>>();
  for (const auto& jv : j.at("instances")) {
    InstanceView v;
    v.id = jv.at("id").template get<std::string>();
    v.category = jv.at("category").template get<std::string>();
    if (jv.contains("attributes")) {
      for (const auto& [k, val] : jv.at("attributes").items()) v.attributes[k] = val.template get<std::string>();
    }
    v.room = jv.value("room", std::string{});
    v.visibility = jv.value("visibility", 0.0);
    v.bearing = jv.value("bearing", 0.0);
    v.range = jv.value("range", 0.0);
    s.instances.push_back(std::move(v));
  }
  return s;
}

}  // namespace eqa::oracles

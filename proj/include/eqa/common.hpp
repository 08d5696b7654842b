#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eqa {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed scene text (bad JSON, wrong row length, missing fields).
struct ParseError : Error {
  using Error::Error;
};

// Well-formed input that violates a scene invariant.
struct ValidationError : Error {
  using Error::Error;
};

struct NoPathError : Error {
  using Error::Error;
};

// Map and observation (or scene) disagree on grid dimensions.
struct FrameMismatchError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Wraps to [0, 2π).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Wraps to (-π, π].
inline double wrap_pi(double a) {
  double r = wrap_two_pi(a);
  if (r > kPi) r -= kTwoPi;
  return r;
}

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

struct AgentPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, [0, 2π), measured from +x toward +y

  Point position() const { return {x, y}; }
};

enum class Action : std::uint8_t { forward, turn_left, turn_right, stop };

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::forward: return "forward";
    case Action::turn_left: return "turn_left";
    case Action::turn_right: return "turn_right";
    case Action::stop: return "stop";
  }
  return "stop";
}

// Grid geometry shared by the scene and the agent's map. Row 0 is the top;
// cell (r, c) spans x in [c*s, (c+1)*s), y in [r*s, (r+1)*s).
struct GridFrame {
  int width = 0;
  int height = 0;
  double cell_size = 0.05;

  bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width; }

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.col);
  }

  Cell cell_at(std::size_t idx) const {
    return {static_cast<int>(idx / static_cast<std::size_t>(width)), static_cast<int>(idx % static_cast<std::size_t>(width))};
  }

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

  Cell cell_of(Point p) const {
    return {static_cast<int>(std::floor(p.y / cell_size)), static_cast<int>(std::floor(p.x / cell_size))};
  }

  Point center_of(Cell c) const { return {(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size}; }

  friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

// Agent motion and sensor conventions.
struct Kinematics {
  double forward_step_m = 0.25;
  double turn_step_deg = 30.0;

  double turn_step_rad() const { return deg_to_rad(turn_step_deg); }
  int heading_count() const { return static_cast<int>(std::lround(360.0 / turn_step_deg)); }
};

struct SensorConfig {
  int ray_count = 90;
  double fov_deg = 90.0;
  double max_range_m = 5.0;
};

}  // namespace eqa

// Planar geometry primitives shared by the simulator, planner and metrics.
//
// Frames: the map frame is a fixed world frame. The ego frame has x forward,
// y left, origin at the ego rear axle. Headings are radians in (-pi, pi].

#pragma once

#include <cstddef>
#include <vector>

namespace xdrive {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2& o) const = default;

  double norm() const;
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  // z-component of the 2D cross product; positive when `o` is to the left.
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

double distance(const Vec2& a, const Vec2& b);

// Wraps an angle to (-pi, pi].
double normalize_angle(double a);

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, (-pi, pi]
  double speed = 0.0;    // m/s, >= 0

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose&) const = default;
};

// Axis-aligned 3D box: center plus strictly positive extents. The reporting
// frame is contextual (map or ego); no yaw is modeled.
struct Box3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double length = 0.0;  // extent along x
  double width = 0.0;   // extent along y
  double height = 0.0;  // extent along z

  bool operator==(const Box3& o) const = default;

  double volume() const { return length * width * height; }
  // 2D footprint overlap test (x/y only).
  bool overlaps_footprint(const Box3& o) const;
};

// Map->ego: expresses a map-frame point in the ego frame (x forward, y left,
// origin at the ego rear axle).
Vec2 to_ego_frame(const Pose& ego, const Vec2& map_point);
Vec2 to_map_frame(const Pose& ego, const Vec2& ego_point);

// Polyline with precomputed cumulative arc length. Queried by arc position s
// (clamped to [0, length]) and by closest-point projection.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  bool empty() const { return pts_.size() < 2; }
  std::size_t size() const { return pts_.size(); }
  const std::vector<Vec2>& points() const { return pts_; }
  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }

  Vec2 point_at(double s) const;
  double heading_at(double s) const;

  struct Projection {
    double s = 0.0;        // arc position of the closest point
    double lateral = 0.0;  // signed offset, positive left of travel direction
    double dist = 0.0;     // unsigned distance
  };
  Projection project(const Vec2& p) const;

  // True when no two non-adjacent segments intersect.
  bool is_simple() const;

  bool operator==(const Polyline& o) const { return pts_ == o.pts_; }

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

}  // namespace xdrive

#include "xdrive/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace xdrive {

double Vec2::norm() const {
  return std::hypot(x, y);
}

double distance(const Vec2& a, const Vec2& b) {
  return (a - b).norm();
}

double normalize_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

bool Box3::overlaps_footprint(const Box3& o) const {
  return std::abs(x - o.x) < 0.5 * (length + o.length) &&
         std::abs(y - o.y) < 0.5 * (width + o.width);
}

Vec2 to_ego_frame(const Pose& ego, const Vec2& map_point) {
  const double c = std::cos(ego.heading);
  const double s = std::sin(ego.heading);
  const double dx = map_point.x - ego.x;
  const double dy = map_point.y - ego.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 to_map_frame(const Pose& ego, const Vec2& ego_point) {
  const double c = std::cos(ego.heading);
  const double s = std::sin(ego.heading);
  return {ego.x + c * ego_point.x - s * ego_point.y,
          ego.y + s * ego_point.x + c * ego_point.y};
}

Polyline::Polyline(std::vector<Vec2> points) : pts_(std::move(points)) {
  cum_.reserve(pts_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (i > 0) acc += distance(pts_[i - 1], pts_[i]);
    cum_.push_back(acc);
  }
}

Vec2 Polyline::point_at(double s) const {
  if (pts_.empty()) return {};
  if (pts_.size() == 1 || s <= 0.0) return pts_.front();
  if (s >= length()) return pts_.back();
  auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  if (i == 0) return pts_.front();
  const double seg = cum_[i] - cum_[i - 1];
  const double f = seg > 0.0 ? (s - cum_[i - 1]) / seg : 0.0;
  return pts_[i - 1] + (pts_[i] - pts_[i - 1]) * f;
}

double Polyline::heading_at(double s) const {
  if (pts_.size() < 2) return 0.0;
  s = std::clamp(s, 0.0, length());
  auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  if (i == 0) i = 1;
  if (i >= pts_.size()) i = pts_.size() - 1;
  // Skip zero-length segments.
  while (i + 1 < pts_.size() && cum_[i] - cum_[i - 1] <= 0.0) ++i;
  const Vec2 d = pts_[i] - pts_[i - 1];
  return std::atan2(d.y, d.x);
}

Polyline::Projection Polyline::project(const Vec2& p) const {
  Projection best;
  if (pts_.empty()) return best;
  if (pts_.size() == 1) {
    best.dist = distance(p, pts_[0]);
    best.lateral = best.dist;
    return best;
  }
  double best_d2 = -1.0;
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    const Vec2 a = pts_[i];
    const Vec2 b = pts_[i + 1];
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    const Vec2 d = p - q;
    const double d2 = d.dot(d);
    if (best_d2 < 0.0 || d2 < best_d2) {
      best_d2 = d2;
      best.s = cum_[i] + std::sqrt(len2) * t;
      best.dist = std::sqrt(d2);
      const double side = ab.cross(p - a);
      best.lateral = side >= 0.0 ? best.dist : -best.dist;
    }
  }
  return best;
}

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = (q - p).cross(r - p);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  auto on_seg = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 &&
           std::min(p.y, q.y) - 1e-12 <= r.y && r.y <= std::max(p.y, q.y) + 1e-12;
  };
  if (o1 == 0 && on_seg(a, b, c)) return true;
  if (o2 == 0 && on_seg(a, b, d)) return true;
  if (o3 == 0 && on_seg(c, d, a)) return true;
  if (o4 == 0 && on_seg(c, d, b)) return true;
  return false;
}

}  // namespace

bool Polyline::is_simple() const {
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    for (std::size_t j = i + 2; j + 1 < pts_.size(); ++j) {
      if (segments_intersect(pts_[i], pts_[i + 1], pts_[j], pts_[j + 1])) return false;
    }
  }
  return true;
}

}  // namespace xdrive

#pragma once

#include <cmath>
#include <vector>

namespace l2e {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Axis-aligned rectangle, closed.
struct Rect {
  Vec2 center;
  Vec2 half;

  double min_x() const { return center.x - half.x; }
  double max_x() const { return center.x + half.x; }
  double min_y() const { return center.y - half.y; }
  double max_y() const { return center.y + half.y; }

  bool contains(Vec2 p) const {
    return p.x >= min_x() && p.x <= max_x() && p.y >= min_y() && p.y <= max_y();
  }
  bool overlaps(const Rect& o) const {
    return min_x() <= o.max_x() && o.min_x() <= max_x() && min_y() <= o.max_y() &&
           o.min_y() <= max_y();
  }
  /// Euclidean distance from p to the rectangle (0 inside).
  double distance_to(Vec2 p) const;
};

using ObstacleSet = std::vector<Rect>;

/// Exact test whether the closed segment [a, b] touches the closed rectangle.
bool segment_intersects(Vec2 a, Vec2 b, const Rect& r);

bool segment_intersects_any(Vec2 a, Vec2 b, const ObstacleSet& obstacles);
bool inside_any(Vec2 p, const ObstacleSet& obstacles);

/// Separating-axis test between a square of half-size `half` rotated by `yaw`
/// around `center` and an axis-aligned rectangle.
bool square_overlaps_rect(Vec2 center, double half, double yaw, const Rect& r);

/// Whether a disc overlaps a rotated square (boundary contact excluded).
bool disc_overlaps_square(Vec2 disc, double radius, Vec2 center, double half, double yaw);

}  // namespace l2e

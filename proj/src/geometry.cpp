#include "l2e/geometry.hpp"

#include <algorithm>
#include <array>

namespace l2e {

double Rect::distance_to(Vec2 p) const {
  const double dx = std::max({min_x() - p.x, 0.0, p.x - max_x()});
  const double dy = std::max({min_y() - p.y, 0.0, p.y - max_y()});
  return std::hypot(dx, dy);
}

bool segment_intersects(Vec2 a, Vec2 b, const Rect& r) {
  // Liang-Barsky clipping of the parametric segment a + t (b - a), t in [0, 1].
  const Vec2 d = b - a;
  double t0 = 0.0;
  double t1 = 1.0;
  const std::array<double, 4> p{-d.x, d.x, -d.y, d.y};
  const std::array<double, 4> q{a.x - r.min_x(), r.max_x() - a.x, a.y - r.min_y(),
                                r.max_y() - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

bool segment_intersects_any(Vec2 a, Vec2 b, const ObstacleSet& obstacles) {
  return std::any_of(obstacles.begin(), obstacles.end(),
                     [&](const Rect& r) { return segment_intersects(a, b, r); });
}

bool inside_any(Vec2 p, const ObstacleSet& obstacles) {
  return std::any_of(obstacles.begin(), obstacles.end(),
                     [&](const Rect& r) { return r.contains(p); });
}

bool square_overlaps_rect(Vec2 center, double half, double yaw, const Rect& r) {
  const Vec2 u = rotate({1.0, 0.0}, yaw);
  const Vec2 v = rotate({0.0, 1.0}, yaw);
  const Vec2 t = r.center - center;
  // Candidate separating axes: the two world axes and the two square axes.
  const std::array<Vec2, 4> axes{Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, u, v};
  for (const Vec2& axis : axes) {
    const double square_extent = half * (std::abs(u.dot(axis)) + std::abs(v.dot(axis)));
    const double rect_extent = r.half.x * std::abs(axis.x) + r.half.y * std::abs(axis.y);
    if (std::abs(t.dot(axis)) > square_extent + rect_extent) return false;
  }
  return true;
}

bool disc_overlaps_square(Vec2 disc, double radius, Vec2 center, double half, double yaw) {
  const Vec2 local = rotate(disc - center, -yaw);
  const Vec2 closest{std::clamp(local.x, -half, half), std::clamp(local.y, -half, half)};
  return (local - closest).norm() < radius;
}

}  // namespace l2e

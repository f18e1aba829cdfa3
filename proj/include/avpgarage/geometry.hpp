#pragma once

#include <array>
#include <cmath>

namespace avpgarage {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const Vec3&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return (1.0 / norm(a)) * a; }

// Counter-clockwise rotation of a planar vector.
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Axis-aligned bounds.
struct Aabb {
  Vec3 lo;
  Vec3 hi;
  bool overlaps(const Aabb& o) const {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y && lo.z <= o.hi.z &&
           o.lo.z <= hi.z;
  }
};

// Box rotated by `yaw` about the vertical axis through its center. Half
// extents are measured in the box's local frame.
struct Box3 {
  Vec3 center;
  Vec3 half_extents{0.5, 0.5, 0.5};
  double yaw = 0.0;

  bool operator==(const Box3&) const = default;

  // Local axes expressed in world coordinates.
  Vec3 axis_x() const { return {std::cos(yaw), std::sin(yaw), 0.0}; }
  Vec3 axis_y() const { return {-std::sin(yaw), std::cos(yaw), 0.0}; }

  Aabb aabb() const {
    const double c = std::abs(std::cos(yaw)), s = std::abs(std::sin(yaw));
    const Vec3 r{c * half_extents.x + s * half_extents.y, s * half_extents.x + c * half_extents.y, half_extents.z};
    return {center - r, center + r};
  }

  std::array<Vec3, 8> corners() const {
    std::array<Vec3, 8> out{};
    const Vec3 ax = axis_x(), ay = axis_y(), az{0, 0, 1};
    int k = 0;
    for (int sz : {-1, 1})
      for (int sy : {-1, 1})
        for (int sx : {-1, 1})
          out[k++] = center + (sx * half_extents.x) * ax + (sy * half_extents.y) * ay + (sz * half_extents.z) * az;
    return out;
  }
};

inline Box3 box_from_bounds(Vec3 lo, Vec3 hi) { return {0.5 * (lo + hi), 0.5 * (hi - lo), 0.0}; }

}  // namespace avpgarage

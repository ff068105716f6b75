// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace procscene {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Vec3 operator*(const Vec3& a, double s) {
    return {a.x * s, a.y * s, a.z * s};
  }
  friend Vec3 operator*(double s, const Vec3& a) { return a * s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Rgb {
  double r = 0.5;
  double g = 0.5;
  double b = 0.5;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Wraps an angle into (-pi, pi].
double normalize_heading(double radians);

/// Rotates (x, y) by `radians` about the z axis; z passes through.
Vec3 rotate_z(const Vec3& v, double radians);

/// Yaw-oriented box. `size` is (length along the heading axis, width, height).
struct Box3 {
  Vec3 center;
  Vec3 size{1.0, 1.0, 1.0};
  double heading = 0.0;
  friend bool operator==(const Box3&, const Box3&) = default;
};

double box_volume(const Box3& box);

/// Corner order: bottom face (z - h/2) counter-clockwise starting at local
/// (-l/2, -w/2), then the top face in the same order.
std::array<Vec3, 8> box_corners(const Box3& box);

/// Footprint rectangle in the xy plane, counter-clockwise.
std::array<Vec2, 4> box_footprint(const Box3& box);

/// Expresses a world point in the box's local frame (origin at center).
Vec3 to_box_frame(const Vec3& p, const Box3& box);

/// Boundary-inclusive containment test.
bool point_in_box(const Vec3& p, const Box3& box);

std::size_t count_points_in_box(std::span<const Vec3> points, const Box3& box);

/// Exact oriented 3D IoU: clipped footprint area times z overlap.
/// Evaluation order is canonicalized so iou3d(a, b) == iou3d(b, a) bitwise.
double iou3d(const Box3& a, const Box3& b);

/// Area of the intersection of two box footprints.
double footprint_intersection_area(const Box3& a, const Box3& b);

// Polygon helpers (xy plane). Polygons are vertex lists, CCW for positive area.
double polygon_area(std::span<const Vec2> poly);

/// Sutherland-Hodgman: clips `subject` against every edge of the convex CCW
/// polygon `clip`. The subject may be concave; the area of the result is exact.
std::vector<Vec2> clip_polygon(std::span<const Vec2> subject,
                               std::span<const Vec2> clip);

/// Boundary-inclusive point-in-polygon for simple polygons.
bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly,
                      double tolerance = 1e-9);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

struct Triangle {
  Vec3 a, b, c;
  double area() const { return 0.5 * norm(cross(b - a, c - a)); }
};

/// Indexed triangle mesh with optional per-vertex colors.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  std::vector<Rgb> colors;  // empty, or one per vertex

  bool has_colors() const {
    return !colors.empty() && colors.size() == vertices.size();
  }
  Triangle triangle(std::size_t face) const {
    const auto& f = faces[face];
    return {vertices[f[0]], vertices[f[1]], vertices[f[2]]};
  }
  double surface_area() const;

  /// Appends `other`, offsetting its indices. Colors are kept only when both
  /// sides carry them (or this mesh is empty).
  void append(const TriMesh& other);

  /// Throws Error(kInvariant) when a face index is out of range.
  void validate() const;
};

struct Aabb {
  Vec3 min;
  Vec3 max;
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
};

Aabb mesh_aabb(const TriMesh& mesh);

/// Bounds of the mesh vertices expressed in the frame of a box placed at
/// `center` with yaw `heading`.
Aabb mesh_bounds_in_frame(const TriMesh& mesh, const Vec3& center,
                          double heading);

/// In-place rigid transform: yaw about the origin, then translate.
void transform_mesh(TriMesh& mesh, double yaw, const Vec3& translation);

/// Axis-aligned box mesh (12 triangles, 8 vertices) with a uniform color.
TriMesh make_box_mesh(const Vec3& min, const Vec3& max, const Rgb& color);

}  // namespace procscene

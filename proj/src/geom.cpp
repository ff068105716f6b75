// SPDX-License-Identifier: Apache-2.0
#include "procscene/geom.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>

#include "procscene/error.hpp"

namespace procscene {

namespace {

constexpr double kPi = std::numbers::pi;

// Slack for the inclusive boundary rule; absorbs the rounding of a
// rotate/inverse-rotate round trip.
constexpr double kBoundaryEps = 1e-9;

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool canonical_less(const Box3& a, const Box3& b) {
  return std::tie(a.center.x, a.center.y, a.center.z, a.size.x, a.size.y,
                  a.size.z, a.heading) <
         std::tie(b.center.x, b.center.y, b.center.z, b.size.x, b.size.y,
                  b.size.z, b.heading);
}

}  // namespace

double normalize_heading(double radians) {
  double r = std::fmod(radians + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

Vec3 rotate_z(const Vec3& v, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

double box_volume(const Box3& box) {
  return box.size.x * box.size.y * box.size.z;
}

std::array<Vec3, 8> box_corners(const Box3& box) {
  const double hl = box.size.x * 0.5;
  const double hw = box.size.y * 0.5;
  const double hh = box.size.z * 0.5;
  const std::array<Vec2, 4> local = {
      Vec2{-hl, -hw}, Vec2{hl, -hw}, Vec2{hl, hw}, Vec2{-hl, hw}};
  std::array<Vec3, 8> out{};
  for (int i = 0; i < 4; ++i) {
    const Vec3 r = rotate_z({local[i].x, local[i].y, 0.0}, box.heading);
    out[i] = {box.center.x + r.x, box.center.y + r.y, box.center.z - hh};
    out[i + 4] = {box.center.x + r.x, box.center.y + r.y, box.center.z + hh};
  }
  return out;
}

std::array<Vec2, 4> box_footprint(const Box3& box) {
  const auto corners = box_corners(box);
  return {Vec2{corners[0].x, corners[0].y}, Vec2{corners[1].x, corners[1].y},
          Vec2{corners[2].x, corners[2].y}, Vec2{corners[3].x, corners[3].y}};
}

Vec3 to_box_frame(const Vec3& p, const Box3& box) {
  return rotate_z(p - box.center, -box.heading);
}

bool point_in_box(const Vec3& p, const Box3& box) {
  const Vec3 local = to_box_frame(p, box);
  for (int axis = 0; axis < 3; ++axis) {
    const double half = box.size[axis] * 0.5;
    const double slack = kBoundaryEps * std::max(1.0, half);
    if (std::abs(local[axis]) > half + slack) return false;
  }
  return true;
}

std::size_t count_points_in_box(std::span<const Vec3> points,
                                const Box3& box) {
  // Hoisted trig; same predicate as point_in_box.
  const double c = std::cos(-box.heading);
  const double s = std::sin(-box.heading);
  double half[3];
  double slack[3];
  for (int axis = 0; axis < 3; ++axis) {
    half[axis] = box.size[axis] * 0.5;
    slack[axis] = kBoundaryEps * std::max(1.0, half[axis]);
  }
  std::size_t count = 0;
  for (const Vec3& p : points) {
    const Vec3 d = p - box.center;
    const double lx = c * d.x - s * d.y;
    const double ly = s * d.x + c * d.y;
    if (std::abs(lx) <= half[0] + slack[0] &&
        std::abs(ly) <= half[1] + slack[1] &&
        std::abs(d.z) <= half[2] + slack[2]) {
      ++count;
    }
  }
  return count;
}

double polygon_area(std::span<const Vec2> poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

std::vector<Vec2> clip_polygon(std::span<const Vec2> subject,
                               std::span<const Vec2> clip) {
  std::vector<Vec2> output(subject.begin(), subject.end());
  std::vector<Vec2> input;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Vec2& c0 = clip[e];
    const Vec2& c1 = clip[(e + 1) % clip.size()];
    input.swap(output);
    output.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2& p = input[i];
      const Vec2& q = input[(i + 1) % input.size()];
      const double dp = cross2(c0, c1, p);
      const double dq = cross2(c0, c1, q);
      const bool p_in = dp >= 0.0;
      const bool q_in = dq >= 0.0;
      if (p_in) output.push_back(p);
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        output.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  return output;
}

double footprint_intersection_area(const Box3& a, const Box3& b) {
  const Box3& first = canonical_less(b, a) ? b : a;
  const Box3& second = canonical_less(b, a) ? a : b;
  if (first.size.x <= 0.0 || first.size.y <= 0.0 || second.size.x <= 0.0 ||
      second.size.y <= 0.0) {
    return 0.0;
  }
  // Cheap reject on circumscribed circles.
  const double ra = 0.5 * std::hypot(first.size.x, first.size.y);
  const double rb = 0.5 * std::hypot(second.size.x, second.size.y);
  const double dx = first.center.x - second.center.x;
  const double dy = first.center.y - second.center.y;
  if (dx * dx + dy * dy > (ra + rb) * (ra + rb)) return 0.0;

  const auto fa = box_footprint(first);
  const auto fb = box_footprint(second);
  const auto clipped = clip_polygon(fa, fb);
  return std::max(0.0, polygon_area(clipped));
}

double iou3d(const Box3& a, const Box3& b) {
  const double va = box_volume(a);
  const double vb = box_volume(b);
  if (!(va > 0.0) || !(vb > 0.0)) return 0.0;

  const double a_lo = a.center.z - 0.5 * a.size.z;
  const double a_hi = a.center.z + 0.5 * a.size.z;
  const double b_lo = b.center.z - 0.5 * b.size.z;
  const double b_hi = b.center.z + 0.5 * b.size.z;
  const double z_overlap = std::min(a_hi, b_hi) - std::max(a_lo, b_lo);
  if (z_overlap <= 0.0) return 0.0;

  const double area = footprint_intersection_area(a, b);
  if (area <= 0.0) return 0.0;
  const double inter = area * z_overlap;
  // va + vb is commutative in IEEE arithmetic, so the result stays symmetric.
  const double uni = va + vb - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly,
                      double tolerance) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= tolerance) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double TriMesh::surface_area() const {
  double total = 0.0;
  for (std::size_t i = 0; i < faces.size(); ++i) total += triangle(i).area();
  return total;
}

void TriMesh::append(const TriMesh& other) {
  const bool keep_colors =
      (vertices.empty() || has_colors()) && other.has_colors();
  const auto offset = static_cast<std::uint32_t>(vertices.size());
  if (!keep_colors) colors.clear();
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  if (keep_colors) {
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
  }
  faces.reserve(faces.size() + other.faces.size());
  for (const auto& f : other.faces) {
    faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  }
}

void TriMesh::validate() const {
  for (const auto& f : faces) {
    for (std::uint32_t idx : f) {
      if (idx >= vertices.size()) {
        throw Error(ErrorCode::kInvariant,
                    "mesh face index " + std::to_string(idx) +
                        " exceeds vertex count " +
                        std::to_string(vertices.size()));
      }
    }
  }
  if (!colors.empty() && colors.size() != vertices.size()) {
    throw Error(ErrorCode::kInvariant,
                "mesh color count does not match vertex count");
  }
}

Aabb mesh_aabb(const TriMesh& mesh) {
  return mesh_bounds_in_frame(mesh, Vec3{}, 0.0);
}

Aabb mesh_bounds_in_frame(const TriMesh& mesh, const Vec3& center,
                          double heading) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Aabb box{{kInf, kInf, kInf}, {-kInf, -kInf, -kInf}};
  if (mesh.vertices.empty()) return Aabb{};
  for (const Vec3& v : mesh.vertices) {
    const Vec3 local = rotate_z(v - center, -heading);
    for (int axis = 0; axis < 3; ++axis) {
      box.min[axis] = std::min(box.min[axis], local[axis]);
      box.max[axis] = std::max(box.max[axis], local[axis]);
    }
  }
  return box;
}

void transform_mesh(TriMesh& mesh, double yaw, const Vec3& translation) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  for (Vec3& v : mesh.vertices) {
    v = {c * v.x - s * v.y + translation.x, s * v.x + c * v.y + translation.y,
         v.z + translation.z};
  }
}

TriMesh make_box_mesh(const Vec3& lo, const Vec3& hi, const Rgb& color) {
  TriMesh mesh;
  mesh.vertices = {
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z},
      {lo.x, hi.y, lo.z}, {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z},
      {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
  };
  // Outward-facing winding.
  mesh.faces = {
      {0, 2, 1}, {0, 3, 2},  // bottom
      {4, 5, 6}, {4, 6, 7},  // top
      {0, 1, 5}, {0, 5, 4},  // -y
      {1, 2, 6}, {1, 6, 5},  // +x
      {2, 3, 7}, {2, 7, 6},  // +y
      {3, 0, 4}, {3, 4, 7},  // -x
  };
  mesh.colors.assign(mesh.vertices.size(), color);
  return mesh;
}

}  // namespace procscene

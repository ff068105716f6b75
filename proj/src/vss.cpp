// SPDX-License-Identifier: Apache-2.0
#include "procscene/vss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "procscene/error.hpp"

namespace procscene {

namespace {

constexpr double kPi = std::numbers::pi;

double truncated_normal(Rng& rng, double sigma, double clip) {
  if (sigma <= 0.0 || clip <= 0.0) return 0.0;
  for (;;) {
    const double v = sigma * standard_normal(rng);
    if (std::abs(v) <= clip) return v;
  }
}

}  // namespace

void VssConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  check(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  check(noise_clip >= 0.0, "noise_clip must be >= 0");
  check(depth_tolerance >= 0.0, "depth_tolerance must be >= 0");
  check(n_cameras >= 1, "n_cameras must be >= 1");
  check(fov > 0.0 && fov < kPi, "fov must lie in (0, pi)");
  check(resolution > 0, "resolution must be positive");
  check(camera_height_min <= camera_height_max, "camera height range invalid");
}

PointCloud jitter_points(const PointCloud& cloud, const VssConfig& cfg,
                         Rng& rng) {
  PointCloud out = cloud;
  if (cfg.noise_sigma <= 0.0) return out;
  for (Vec3& p : out.positions) {
    p.x += truncated_normal(rng, cfg.noise_sigma, cfg.noise_clip);
    p.y += truncated_normal(rng, cfg.noise_sigma, cfg.noise_clip);
    p.z += truncated_normal(rng, cfg.noise_sigma, cfg.noise_clip);
  }
  return out;
}

std::vector<Camera> sample_cameras(const RoomSpec& room, const VssConfig& cfg,
                                   Rng& rng) {
  double min_x = std::numeric_limits<double>::max();
  double min_y = min_x;
  double max_x = std::numeric_limits<double>::lowest();
  double max_y = max_x;
  for (const Vec2& p : room.footprint) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  std::vector<Camera> cams;
  cams.reserve(static_cast<std::size_t>(cfg.n_cameras));
  for (int i = 0; i < cfg.n_cameras; ++i) {
    Camera cam;
    Vec2 xy{};
    do {
      xy = {uniform(rng, min_x, max_x), uniform(rng, min_y, max_y)};
    } while (!point_in_polygon(xy, room.footprint, 0.0));
    cam.position = {xy.x, xy.y,
                    uniform(rng, cfg.camera_height_min, cfg.camera_height_max)};
    cam.yaw = normalize_heading(uniform(rng, -kPi, kPi));
    cam.pitch = 0.0;
    cam.fov = cfg.fov;
    cam.width = cfg.resolution;
    cam.height = cfg.resolution;
    cams.push_back(cam);
  }
  return cams;
}

Projection project_point(const Camera& camera, const Vec3& p) {
  const double cp = std::cos(camera.pitch);
  const Vec3 forward{std::cos(camera.yaw) * cp, std::sin(camera.yaw) * cp,
                     std::sin(camera.pitch)};
  const Vec3 right{std::sin(camera.yaw), -std::cos(camera.yaw), 0.0};
  const Vec3 up = cross(right, forward);

  const Vec3 d = p - camera.position;
  const double depth = dot(d, forward);
  Projection proj;
  proj.depth = depth;
  if (!(depth > 0.0)) return proj;
  const double half = std::tan(0.5 * camera.fov);
  const double u = dot(d, right) / (depth * half);  // [-1, 1] in frustum
  const double v = dot(d, up) / (depth * half);
  if (!(std::abs(u) <= 1.0 && std::abs(v) <= 1.0)) return proj;
  const int col = std::min(camera.width - 1,
                           static_cast<int>((u + 1.0) * 0.5 * camera.width));
  const int row = std::min(camera.height - 1,
                           static_cast<int>((1.0 - v) * 0.5 * camera.height));
  proj.pixel = row * camera.width + col;
  return proj;
}

std::vector<bool> visible_from(const PointCloud& cloud, const Camera& camera,
                               double depth_tolerance) {
  const std::size_t n = cloud.size();
  std::vector<Projection> proj(n);
  std::vector<double> zbuf(static_cast<std::size_t>(camera.width) *
                               static_cast<std::size_t>(camera.height),
                           std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    proj[i] = project_point(camera, cloud.positions[i]);
    if (proj[i].pixel >= 0) {
      double& z = zbuf[static_cast<std::size_t>(proj[i].pixel)];
      z = std::min(z, proj[i].depth);
    }
  }
  std::vector<bool> visible(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (proj[i].pixel < 0) continue;
    visible[i] = proj[i].depth <=
                 zbuf[static_cast<std::size_t>(proj[i].pixel)] + depth_tolerance;
  }
  return visible;
}

PointCloud simulate_occlusion(const PointCloud& cloud,
                              const std::vector<Camera>& cameras,
                              const VssConfig& cfg) {
  if (cameras.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "simulate_occlusion requires at least one camera");
  }
  std::vector<bool> keep(cloud.size(), false);
  for (const Camera& cam : cameras) {
    const auto vis = visible_from(cloud, cam, cfg.depth_tolerance);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (vis[i]) keep[i] = true;
    }
  }
  PointCloud out;
  if (cloud.heights) out.heights.emplace();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep[i]) out.push_from(cloud, i);
  }
  return out;
}

PointCloud vss_augment(const PointCloud& cloud, const RoomSpec& room,
                       const VssConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto cameras = sample_cameras(room, cfg, rng);
  return jitter_points(simulate_occlusion(cloud, cameras, cfg), cfg, rng);
}

}  // namespace procscene

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "procscene/geom.hpp"
#include "procscene/point_cloud.hpp"
#include "procscene/procgen.hpp"
#include "procscene/rng.hpp"

namespace procscene {

/// Pinhole camera with a square field of view.
struct Camera {
  Vec3 position;
  double yaw = 0.0;
  double pitch = 0.0;
  double fov = std::numbers::pi / 2.0;
  int width = 128;
  int height = 128;
};

struct VssConfig {
  double noise_sigma = 0.02;
  double noise_clip = 0.05;
  int n_cameras = 6;
  double depth_tolerance = 0.05;
  double camera_height_min = 1.2;
  double camera_height_max = 1.8;
  double fov = std::numbers::pi / 2.0;
  int resolution = 128;

  void validate() const;
};

/// Independent Gaussian(0, sigma) offsets per coordinate, truncated to
/// [-clip, clip] by resampling.
PointCloud jitter_points(const PointCloud& cloud, const VssConfig& cfg,
                         Rng& rng);

/// Uniform interior positions, uniform yaw, zero pitch.
std::vector<Camera> sample_cameras(const RoomSpec& room, const VssConfig& cfg,
                                   Rng& rng);

/// Projection of a point into a camera. `visible_pixel` is -1 when the point
/// falls outside the frustum.
struct Projection {
  int pixel = -1;
  double depth = 0.0;
};
Projection project_point(const Camera& camera, const Vec3& p);

/// Per-point visibility mask for one camera using a z-buffer.
std::vector<bool> visible_from(const PointCloud& cloud, const Camera& camera,
                               double depth_tolerance);

/// Keeps the points visible from at least one camera, in input order.
PointCloud simulate_occlusion(const PointCloud& cloud,
                              const std::vector<Camera>& cameras,
                              const VssConfig& cfg);

/// Occlusion (with cameras sampled from `room`) followed by jitter.
PointCloud vss_augment(const PointCloud& cloud, const RoomSpec& room,
                       const VssConfig& cfg, Rng& rng);

}  // namespace procscene

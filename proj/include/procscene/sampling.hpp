// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "procscene/geom.hpp"
#include "procscene/point_cloud.hpp"
#include "procscene/rng.hpp"

namespace procscene {

struct SamplerConfig {
  std::size_t points_per_scene = 40000;
  double points_per_m2 = 500.0;
};

/// Area-weighted uniform surface sampling. Vertex colors are interpolated
/// barycentrically; meshes without colors give gray 0.5.
/// Throws Error(kDegenerate) for a zero-area mesh when n > 0.
PointCloud sample_mesh_surface(const TriMesh& mesh, std::size_t n, Rng& rng);

/// Exactly n points: without replacement when the cloud holds at least n,
/// with replacement otherwise. An empty cloud yields an empty result.
PointCloud subsample(const PointCloud& cloud, std::size_t n, Rng& rng);

/// Heights relative to the 1st-percentile (nearest-rank) z value.
/// Throws Error(kInvalidArgument) for an empty cloud.
PointCloud compute_height(PointCloud cloud);

/// Raw density sampling of `mesh` followed by subsampling to
/// cfg.points_per_scene.
PointCloud sample_scene_cloud(const TriMesh& mesh, const SamplerConfig& cfg,
                              Rng& rng);

}  // namespace procscene

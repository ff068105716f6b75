// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "procscene/adapt.hpp"
#include "procscene/annotation.hpp"
#include "procscene/point_cloud.hpp"

namespace procscene {

/// Geometric stand-in detector: floor and wall removal, grid single-linkage
/// clustering, AABB box fit, nearest-mean-size classification.
///
/// The score formula exp(-d^2) * min(1, n/200) is specific to this detector;
/// numbers it produces are not comparable with learned detectors.
struct NaiveModel {
  SizePriors mean_sizes;
  double cluster_radius = 0.15;
  std::size_t min_cluster_points = 25;
  double floor_height = 0.10;
  double wall_margin = 0.10;

  void validate() const;
};

/// Mean sizes from labeled source scenes; thresholds copied from `base`.
NaiveModel fit_naive(const std::vector<SceneAnnotation>& labeled,
                     const NaiveModel& base = {});

/// Connected components of the relation |p_i - p_j| <= radius. Components are
/// ordered by their smallest index and list indices ascending.
std::vector<std::vector<std::size_t>> cluster_points(std::span<const Vec3> points,
                                                     double radius);

/// `room` is the xy footprint used for wall removal; pass an empty span to
/// skip it. The cloud must carry heights.
std::vector<Proposal> detect(const PointCloud& cloud, const NaiveModel& model,
                             std::span<const Vec2> room);

/// Size-nearest category under log-space distance; ties go to the
/// lexicographically smaller name. Returns false when `priors` is empty.
bool classify_by_size(const Vec3& dims, const SizePriors& priors,
                      std::string& category, double& distance);

}  // namespace procscene

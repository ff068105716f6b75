// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "procscene/annotation.hpp"
#include "procscene/geom.hpp"
#include "procscene/point_cloud.hpp"

namespace procscene {

struct Detection {
  Box3 box;
  std::string category;
  double score = 0.0;
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct EvalConfig {
  double iou_threshold = 0.25;
  double nms_iou = 0.25;
  std::size_t min_points = 5;
  double min_side = 0.001;
  bool class_aware_nms = false;

  void validate() const;
};

/// Greedy 3D NMS. Order: score descending, ties by input index ascending.
/// Returns surviving input indices in that order.
std::vector<std::size_t> nms_3d_indices(std::span<const Detection> dets,
                                        double nms_iou, bool class_aware);
std::vector<Detection> nms_3d(std::span<const Detection> dets, double nms_iou,
                              bool class_aware);

/// Point-count filter, then tiny-side filter, then NMS. Returns surviving
/// input indices.
std::vector<std::size_t> postprocess_indices(std::span<const Detection> dets,
                                             std::span<const Vec3> points,
                                             const EvalConfig& cfg);
std::vector<Detection> postprocess(std::span<const Detection> dets,
                                   const PointCloud& cloud,
                                   const EvalConfig& cfg);

struct SceneDetections {
  std::string scene_id;
  std::vector<Detection> detections;
};

struct CategoryResult {
  std::string category;
  double ap = 0.0;
  std::size_t n_gt = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t missed = 0;
  std::vector<double> precision;  // one entry per ranked detection
  std::vector<double> recall;
};

/// Ranks every detection of `category` across scenes and greedily matches it
/// to the unmatched same-scene ground truth of maximal IoU. AP uses all-point
/// interpolation over the precision envelope.
CategoryResult evaluate_category(const std::vector<SceneDetections>& dets,
                                 const std::vector<SceneAnnotation>& gts,
                                 const std::string& category,
                                 double iou_threshold);

/// AP for one category; std::nullopt when it has no ground truth.
std::optional<double> average_precision(
    const std::vector<SceneDetections>& dets,
    const std::vector<SceneAnnotation>& gts, const std::string& category,
    double iou_threshold);

struct EvalReport {
  std::vector<CategoryResult> categories;  // only categories with ground truth
  std::vector<std::string> absent;         // requested but without ground truth
  double map = 0.0;
};

/// mAP over `categories` (all ground-truth categories when empty).
EvalReport map_at(const std::vector<SceneDetections>& dets,
                  const std::vector<SceneAnnotation>& gts,
                  const EvalConfig& cfg,
                  const std::vector<std::string>& categories = {});

struct DatasetStats {
  std::size_t scene_count = 0;
  std::size_t total_boxes = 0;
  std::size_t emptied_scenes = 0;
  double mean_boxes_per_scene = 0.0;
  std::map<std::string, std::size_t> instance_histogram;
  std::map<std::string, Vec3> mean_sizes;
};

DatasetStats dataset_stats(const std::vector<SceneAnnotation>& scenes);

/// Drops annotations outside `shared`. Scenes that end up empty are kept and
/// flagged.
std::vector<SceneAnnotation> filter_categories(
    std::vector<SceneAnnotation> scenes, const std::vector<std::string>& shared);

}  // namespace procscene

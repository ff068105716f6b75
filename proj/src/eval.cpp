// SPDX-License-Identifier: Apache-2.0
#include "procscene/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "procscene/error.hpp"

namespace procscene {

void EvalConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(iou_threshold) || !in_unit(nms_iou)) {
    throw Error(ErrorCode::kInvalidArgument, "IoU thresholds must lie in [0,1]");
  }
  if (!(min_side >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_side must be >= 0");
  }
}

std::vector<std::size_t> nms_3d_indices(std::span<const Detection> dets,
                                        double nms_iou, bool class_aware) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool keep = true;
    for (std::size_t k : kept) {
      if (class_aware && dets[k].category != dets[idx].category) continue;
      if (iou3d(dets[k].box, dets[idx].box) > nms_iou) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(idx);
  }
  return kept;
}

std::vector<Detection> nms_3d(std::span<const Detection> dets, double nms_iou,
                              bool class_aware) {
  std::vector<Detection> out;
  for (std::size_t i : nms_3d_indices(dets, nms_iou, class_aware)) {
    out.push_back(dets[i]);
  }
  return out;
}

std::vector<std::size_t> postprocess_indices(std::span<const Detection> dets,
                                             std::span<const Vec3> points,
                                             const EvalConfig& cfg) {
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (count_points_in_box(points, dets[i].box) < cfg.min_points) continue;
    survivors.push_back(i);
  }
  std::erase_if(survivors, [&](std::size_t i) {
    const Vec3& s = dets[i].box.size;
    return s.x < cfg.min_side || s.y < cfg.min_side || s.z < cfg.min_side;
  });
  std::vector<Detection> filtered;
  filtered.reserve(survivors.size());
  for (std::size_t i : survivors) filtered.push_back(dets[i]);
  std::vector<std::size_t> out;
  for (std::size_t k : nms_3d_indices(filtered, cfg.nms_iou, cfg.class_aware_nms)) {
    out.push_back(survivors[k]);
  }
  return out;
}

std::vector<Detection> postprocess(std::span<const Detection> dets,
                                   const PointCloud& cloud,
                                   const EvalConfig& cfg) {
  std::vector<Detection> out;
  for (std::size_t i : postprocess_indices(dets, cloud.positions, cfg)) {
    out.push_back(dets[i]);
  }
  return out;
}

CategoryResult evaluate_category(const std::vector<SceneDetections>& dets,
                                 const std::vector<SceneAnnotation>& gts,
                                 const std::string& category,
                                 double iou_threshold) {
  CategoryResult result;
  result.category = category;

  // Ground truth of this category per scene, with match flags.
  std::unordered_map<std::string, std::vector<const Box3*>> gt_boxes;
  for (const auto& scene : gts) {
    auto& list = gt_boxes[scene.scene_id];
    for (const auto& o : scene.objects) {
      if (o.category == category) {
        list.push_back(&o.box);
        ++result.n_gt;
      }
    }
  }

  struct Ranked {
    const std::string* scene;
    std::size_t index;
    const Detection* det;
  };
  std::vector<Ranked> ranked;
  for (const auto& scene : dets) {
    for (std::size_t i = 0; i < scene.detections.size(); ++i) {
      if (scene.detections[i].category == category) {
        ranked.push_back({&scene.scene_id, i, &scene.detections[i]});
      }
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.det->score != b.det->score) return a.det->score > b.det->score;
    if (*a.scene != *b.scene) return *a.scene < *b.scene;
    return a.index < b.index;
  });

  std::unordered_map<std::string, std::vector<bool>> matched;
  for (const auto& [id, boxes] : gt_boxes) matched[id].assign(boxes.size(), false);

  result.precision.reserve(ranked.size());
  result.recall.reserve(ranked.size());
  std::size_t tp = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const Ranked& d = ranked[r];
    double best = -1.0;
    std::size_t best_idx = 0;
    auto it = gt_boxes.find(*d.scene);
    if (it != gt_boxes.end()) {
      auto& used = matched[*d.scene];
      for (std::size_t g = 0; g < it->second.size(); ++g) {
        if (used[g]) continue;
        const double iou = iou3d(d.det->box, *it->second[g]);
        if (iou > best) {
          best = iou;
          best_idx = g;
        }
      }
      if (best >= iou_threshold && best >= 0.0) {
        used[best_idx] = true;
        ++tp;
      }
    }
    const double n = static_cast<double>(r + 1);
    result.precision.push_back(static_cast<double>(tp) / n);
    result.recall.push_back(result.n_gt > 0 ? static_cast<double>(tp) /
                                                  static_cast<double>(result.n_gt)
                                            : 0.0);
  }
  result.tp = tp;
  result.fp = ranked.size() - tp;
  result.missed = result.n_gt - tp;

  if (result.n_gt == 0 || ranked.empty()) {
    result.ap = 0.0;
    return result;
  }
  std::vector<double> envelope = result.precision;
  for (std::size_t i = envelope.size() - 1; i > 0; --i) {
    envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    ap += (result.recall[i] - prev_recall) * envelope[i];
    prev_recall = result.recall[i];
  }
  result.ap = std::clamp(ap, 0.0, 1.0);
  return result;
}

std::optional<double> average_precision(
    const std::vector<SceneDetections>& dets,
    const std::vector<SceneAnnotation>& gts, const std::string& category,
    double iou_threshold) {
  const CategoryResult r = evaluate_category(dets, gts, category, iou_threshold);
  if (r.n_gt == 0) return std::nullopt;
  return r.ap;
}

EvalReport map_at(const std::vector<SceneDetections>& dets,
                  const std::vector<SceneAnnotation>& gts,
                  const EvalConfig& cfg,
                  const std::vector<std::string>& categories) {
  cfg.validate();
  std::set<std::string> wanted(categories.begin(), categories.end());
  if (wanted.empty()) {
    for (const auto& s : gts) {
      for (const auto& o : s.objects) wanted.insert(o.category);
    }
  }
  EvalReport report;
  double sum = 0.0;
  for (const std::string& cat : wanted) {
    CategoryResult r = evaluate_category(dets, gts, cat, cfg.iou_threshold);
    if (r.n_gt == 0) {
      report.absent.push_back(cat);
      continue;
    }
    sum += r.ap;
    report.categories.push_back(std::move(r));
  }
  report.map = report.categories.empty()
                   ? 0.0
                   : sum / static_cast<double>(report.categories.size());
  return report;
}

DatasetStats dataset_stats(const std::vector<SceneAnnotation>& scenes) {
  DatasetStats stats;
  stats.scene_count = scenes.size();
  std::map<std::string, Vec3> size_sums;
  for (const auto& s : scenes) {
    if (s.emptied) ++stats.emptied_scenes;
    for (const auto& o : s.objects) {
      ++stats.total_boxes;
      ++stats.instance_histogram[o.category];
      size_sums[o.category] = size_sums[o.category] + o.box.size;
    }
  }
  for (const auto& [cat, sum] : size_sums) {
    stats.mean_sizes[cat] =
        sum * (1.0 / static_cast<double>(stats.instance_histogram[cat]));
  }
  stats.mean_boxes_per_scene =
      scenes.empty() ? 0.0
                     : static_cast<double>(stats.total_boxes) /
                           static_cast<double>(scenes.size());
  return stats;
}

std::vector<SceneAnnotation> filter_categories(
    std::vector<SceneAnnotation> scenes, const std::vector<std::string>& shared) {
  const std::set<std::string> keep(shared.begin(), shared.end());
  for (auto& s : scenes) {
    const bool had_objects = !s.objects.empty();
    std::erase_if(s.objects, [&](const ObjectAnnotation& o) {
      return !keep.contains(o.category);
    });
    if (had_objects && s.objects.empty()) s.emptied = true;
  }
  return scenes;
}

}  // namespace procscene

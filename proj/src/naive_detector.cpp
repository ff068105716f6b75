// SPDX-License-Identifier: Apache-2.0
#include "procscene/naive_detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "procscene/error.hpp"

namespace procscene {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;  // smaller index becomes the root
  }

 private:
  std::vector<std::size_t> parent_;
};

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

void NaiveModel::validate() const {
  if (!(cluster_radius > 0.0) || min_cluster_points == 0 ||
      !(floor_height >= 0.0) || !(wall_margin >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "naive model thresholds must be positive");
  }
  for (const auto& [cat, size] : mean_sizes) {
    if (!(size.x > 0.0 && size.y > 0.0 && size.z > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mean size for '" + cat + "' must be positive");
    }
  }
}

NaiveModel fit_naive(const std::vector<SceneAnnotation>& labeled,
                     const NaiveModel& base) {
  NaiveModel model = base;
  model.mean_sizes = compute_mean_sizes(labeled);
  return model;
}

std::vector<std::vector<std::size_t>> cluster_points(std::span<const Vec3> points,
                                                     double radius) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> clusters;
  if (n == 0) return clusters;
  const double inv = 1.0 / radius;
  const double r2 = radius * radius;
  auto key_of = [&](const Vec3& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x * inv)),
                   static_cast<std::int64_t>(std::floor(p.y * inv)),
                   static_cast<std::int64_t>(std::floor(p.z * inv))};
  };
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid[key_of(points[i])].push_back(i);

  DisjointSet sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CellKey k = key_of(points[i]);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == grid.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i) continue;
            const Vec3 d = points[i] - points[j];
            if (dot(d, d) <= r2) sets.unite(i, j);
          }
        }
      }
    }
  }
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    auto [it, inserted] = slot.try_emplace(root, clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].push_back(i);
  }
  return clusters;
}

bool classify_by_size(const Vec3& dims, const SizePriors& priors,
                      std::string& category, double& distance) {
  constexpr double kMinDim = 1e-3;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto& [cat, mean] : priors) {  // std::map: lexicographic order
    double d2 = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const double diff = std::log(std::max(dims[axis], kMinDim)) -
                          std::log(std::max(mean[axis], kMinDim));
      d2 += diff * diff;
    }
    const double d = std::sqrt(d2);
    if (d < best) {
      best = d;
      category = cat;
      found = true;
    }
  }
  distance = best;
  return found;
}

std::vector<Proposal> detect(const PointCloud& cloud, const NaiveModel& model,
                             std::span<const Vec2> room) {
  std::vector<Proposal> out;
  if (cloud.empty() || model.mean_sizes.empty()) return out;
  if (!cloud.heights) {
    throw Error(ErrorCode::kInvalidArgument, "detect requires per-point heights");
  }
  std::vector<std::size_t> kept;
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if ((*cloud.heights)[i] < model.floor_height) continue;
    const Vec3& p = cloud.positions[i];
    if (!room.empty()) {
      const Vec2 q{p.x, p.y};
      if (!point_in_polygon(q, room, 0.0)) continue;
      bool near_wall = false;
      for (std::size_t e = 0; e < room.size(); ++e) {
        if (point_segment_distance(q, room[e], room[(e + 1) % room.size()]) <=
            model.wall_margin) {
          near_wall = true;
          break;
        }
      }
      if (near_wall) continue;
    }
    kept.push_back(i);
    pts.push_back(p);
  }

  for (const auto& cluster : cluster_points(pts, model.cluster_radius)) {
    if (cluster.size() < model.min_cluster_points) continue;
    Vec3 lo = pts[cluster.front()];
    Vec3 hi = lo;
    Rgb color_sum{0.0, 0.0, 0.0};
    for (std::size_t c : cluster) {
      const Vec3& p = pts[c];
      for (int axis = 0; axis < 3; ++axis) {
        lo[axis] = std::min(lo[axis], p[axis]);
        hi[axis] = std::max(hi[axis], p[axis]);
      }
      const Rgb& col = cloud.colors[kept[c]];
      color_sum.r += col.r;
      color_sum.g += col.g;
      color_sum.b += col.b;
    }
    const Vec3 dims = hi - lo;
    std::string category;
    double distance = 0.0;
    if (!classify_by_size(dims, model.mean_sizes, category, distance)) continue;

    const double count = static_cast<double>(cluster.size());
    Proposal prop;
    prop.detection.box = {(lo + hi) * 0.5, dims, 0.0};
    prop.detection.category = category;
    prop.detection.score =
        std::exp(-distance * distance) * std::min(1.0, count / 200.0);
    prop.feature = {dims.x,
                    dims.y,
                    dims.z,
                    prop.detection.box.center.z,
                    std::log(count),
                    color_sum.r / count,
                    color_sum.g / count,
                    color_sum.b / count};
    out.push_back(std::move(prop));
  }
  return out;
}

}  // namespace procscene

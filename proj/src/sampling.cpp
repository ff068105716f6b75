// SPDX-License-Identifier: Apache-2.0
#include "procscene/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "procscene/error.hpp"

namespace procscene {

void PointCloud::validate() const {
  if (colors.size() != positions.size()) {
    throw Error(ErrorCode::kInvariant, "point cloud color count mismatch");
  }
  if (heights && heights->size() != positions.size()) {
    throw Error(ErrorCode::kInvariant, "point cloud height count mismatch");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!is_finite(positions[i])) {
      throw Error(ErrorCode::kInvariant, "point cloud has non-finite position");
    }
    const Rgb& c = colors[i];
    for (double v : {c.r, c.g, c.b}) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kInvariant, "point color outside [0,1]");
      }
    }
  }
}

PointCloud sample_mesh_surface(const TriMesh& mesh, std::size_t n, Rng& rng) {
  PointCloud out;
  if (n == 0) return out;

  std::vector<double> cdf(mesh.faces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    total += mesh.triangle(i).area();
    cdf[i] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kDegenerate, "degenerate mesh");
  }

  const bool colored = mesh.has_colors();
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = uniform01(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) --it;
    const auto& f = mesh.faces[static_cast<std::size_t>(it - cdf.begin())];

    double u = uniform01(rng);
    double v = uniform01(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const double w = 1.0 - u - v;
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    out.positions.push_back(a + (b - a) * u + (c - a) * v);
    if (colored) {
      const Rgb& ca = mesh.colors[f[0]];
      const Rgb& cb = mesh.colors[f[1]];
      const Rgb& cc = mesh.colors[f[2]];
      out.colors.push_back({std::clamp(w * ca.r + u * cb.r + v * cc.r, 0.0, 1.0),
                            std::clamp(w * ca.g + u * cb.g + v * cc.g, 0.0, 1.0),
                            std::clamp(w * ca.b + u * cb.b + v * cc.b, 0.0, 1.0)});
    } else {
      out.colors.push_back(Rgb{});
    }
  }
  return out;
}

PointCloud subsample(const PointCloud& cloud, std::size_t n, Rng& rng) {
  PointCloud out;
  if (cloud.heights) out.heights.emplace();
  if (n == 0 || cloud.empty()) return out;
  out.reserve(n);
  if (cloud.size() >= n) {
    // Partial Fisher-Yates over the index set.
    std::vector<std::size_t> idx(cloud.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + uniform_index(rng, idx.size() - i);
      std::swap(idx[i], idx[j]);
      out.push_from(cloud, idx[i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_from(cloud, uniform_index(rng, cloud.size()));
    }
  }
  return out;
}

PointCloud compute_height(PointCloud cloud) {
  if (cloud.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "compute_height requires a non-empty cloud");
  }
  std::vector<double> z(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) z[i] = cloud.positions[i].z;
  const auto rank = static_cast<std::size_t>(
      std::ceil(0.01 * static_cast<double>(z.size())));
  const std::size_t k = std::max<std::size_t>(rank, 1) - 1;
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(k),
                   z.end());
  const double floor_z = z[k];

  std::vector<double> heights(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    heights[i] = cloud.positions[i].z - floor_z;
  }
  cloud.heights = std::move(heights);
  return cloud;
}

PointCloud sample_scene_cloud(const TriMesh& mesh, const SamplerConfig& cfg,
                              Rng& rng) {
  const double area = mesh.surface_area();
  const auto raw = static_cast<std::size_t>(
      std::llround(std::max(0.0, area * cfg.points_per_m2)));
  PointCloud dense = sample_mesh_surface(mesh, std::max<std::size_t>(raw, 1), rng);
  return subsample(dense, cfg.points_per_scene, rng);
}

}  // namespace procscene

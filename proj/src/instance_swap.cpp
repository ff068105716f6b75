// SPDX-License-Identifier: Apache-2.0
#include "procscene/instance_swap.hpp"

#include <cmath>

#include "procscene/error.hpp"

namespace procscene {

namespace {

bool ratios_within(const Vec3& dims, const Vec3& target, double tol) {
  const double lo = 1.0 / (1.0 + tol);
  const double hi = 1.0 + tol;
  for (int axis = 0; axis < 3; ++axis) {
    if (!(dims[axis] > 0.0) || !(target[axis] > 0.0)) return false;
    const double r = dims[axis] / target[axis];
    if (r < lo || r > hi) return false;
  }
  return true;
}

}  // namespace

void InstanceLibrary::validate(double tol) const {
  for (const auto& e : entries) {
    e.mesh.validate();
    const Vec3 ext = mesh_aabb(e.mesh).extent();
    for (int axis = 0; axis < 3; ++axis) {
      if (std::abs(ext[axis] - e.dims[axis]) > tol) {
        throw Error(ErrorCode::kInvariant,
                    "library entry '" + e.name +
                        "' dims disagree with its mesh extents");
      }
    }
  }
}

std::vector<SwapCandidate> retrieve_candidates(const InstanceLibrary& lib,
                                               const std::string& category,
                                               const Vec3& target_dims,
                                               const SwapConfig& cfg) {
  std::vector<SwapCandidate> out;
  for (std::size_t i = 0; i < lib.entries.size(); ++i) {
    const LibraryEntry& e = lib.entries[i];
    if (e.category != category) continue;
    if (ratios_within(e.dims, target_dims, cfg.size_tolerance)) {
      out.push_back({i, false});
    } else if (cfg.allow_quarter_turn &&
               ratios_within({e.dims.y, e.dims.x, e.dims.z}, target_dims,
                             cfg.size_tolerance)) {
      out.push_back({i, true});
    }
  }
  return out;
}

TriMesh fit_instance(const TriMesh& mesh, const Vec3& source_dims,
                     const Box3& target, bool quarter_turn) {
  const Aabb bounds = mesh_aabb(mesh);
  Vec3 extent = bounds.extent();
  for (int axis = 0; axis < 3; ++axis) {
    if (!(source_dims[axis] > 0.0) || !(extent[axis] > 0.0)) {
      throw Error(ErrorCode::kDegenerate, "zero source dimension");
    }
  }
  const Vec3 center = bounds.center();
  if (quarter_turn) extent = {extent.y, extent.x, extent.z};
  const Vec3 scale{target.size.x / extent.x, target.size.y / extent.y,
                   target.size.z / extent.z};
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) {
    Vec3 local = v - center;
    if (quarter_turn) local = {-local.y, local.x, local.z};
    v = {local.x * scale.x, local.y * scale.y, local.z * scale.z};
  }
  transform_mesh(out, target.heading, target.center);
  return out;
}

SwapResult swap_scene(const SceneLayout& scene, const InstanceLibrary& lib,
                      const SwapConfig& cfg, Rng& rng) {
  SwapResult result;
  result.scene = scene;
  for (auto& obj : result.scene.objects) {
    const auto candidates =
        retrieve_candidates(lib, obj.category, obj.box.size, cfg);
    if (candidates.empty()) {
      result.kept_ids.push_back(obj.instance_id);
      continue;
    }
    const SwapCandidate& pick = candidates[uniform_index(rng, candidates.size())];
    const LibraryEntry& entry = lib.entries[pick.entry];
    obj.mesh = fit_instance(entry.mesh, entry.dims, obj.box, pick.quarter_turn);
    result.swapped_ids.push_back(obj.instance_id);
  }
  return result;
}

InstanceLibrary build_procedural_library(const GenConfig& cfg,
                                         const std::string& style,
                                         std::size_t per_category,
                                         std::uint64_t seed) {
  InstanceLibrary lib;
  Rng rng(seed);
  for (const CategorySpec& spec : cfg.categories) {
    for (std::size_t k = 0; k < per_category; ++k) {
      const Vec3 dims{uniform(rng, spec.size_min.x, spec.size_max.x),
                      uniform(rng, spec.size_min.y, spec.size_max.y),
                      uniform(rng, spec.size_min.z, spec.size_max.z)};
      LibraryEntry entry;
      entry.name = spec.name + "_" + style + "_" + std::to_string(k);
      entry.category = spec.name;
      entry.mesh = synth_asset(spec, dims, style, rng);
      entry.dims = mesh_aabb(entry.mesh).extent();
      lib.entries.push_back(std::move(entry));
    }
  }
  return lib;
}

}  // namespace procscene

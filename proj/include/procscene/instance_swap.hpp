// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "procscene/geom.hpp"
#include "procscene/procgen.hpp"
#include "procscene/rng.hpp"

namespace procscene {

struct LibraryEntry {
  std::string name;
  std::string category;
  TriMesh mesh;
  Vec3 dims;  // AABB extents of `mesh`
};

struct InstanceLibrary {
  std::vector<LibraryEntry> entries;

  /// Throws Error(kInvariant) when an entry's dims disagree with its mesh.
  void validate(double tol = 1e-4) const;
};

struct SwapConfig {
  double size_tolerance = 0.3;
  bool allow_quarter_turn = true;
};

struct SwapCandidate {
  std::size_t entry = 0;
  bool quarter_turn = false;
  friend bool operator==(const SwapCandidate&, const SwapCandidate&) = default;
};

/// Library entries of `category` whose per-axis ratio to `target_dims` lies
/// in [1/(1+tol), 1+tol]. When the as-is orientation fails and quarter turns
/// are allowed, length and width are exchanged and the entry is flagged.
std::vector<SwapCandidate> retrieve_candidates(const InstanceLibrary& lib,
                                               const std::string& category,
                                               const Vec3& target_dims,
                                               const SwapConfig& cfg);

/// Recenters `mesh` on its AABB, optionally yaws it by +pi/2, rescales each
/// axis to `target.size`, then applies the target heading and center.
/// Throws Error(kDegenerate) for a zero source dimension.
TriMesh fit_instance(const TriMesh& mesh, const Vec3& source_dims,
                     const Box3& target, bool quarter_turn);

struct SwapResult {
  SceneLayout scene;
  std::vector<int> swapped_ids;  // instance ids whose mesh was replaced
  std::vector<int> kept_ids;     // instance ids without a candidate
};

/// Replaces object meshes with size-compatible library instances. Boxes,
/// categories, ids, room and structure are left untouched.
SwapResult swap_scene(const SceneLayout& scene, const InstanceLibrary& lib,
                      const SwapConfig& cfg, Rng& rng);

/// Procedural library: `per_category` assets of `style` per category, with
/// dims drawn from each category's size range.
InstanceLibrary build_procedural_library(const GenConfig& cfg,
                                         const std::string& style,
                                         std::size_t per_category,
                                         std::uint64_t seed);

}  // namespace procscene
